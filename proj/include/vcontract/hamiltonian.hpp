#pragma once

#include <limits>
#include <span>
#include <vector>

#include "vcontract/model.hpp"

namespace vcontract {

struct StatePoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct HamiltonianEval {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<double> argmax;
    std::size_t argmax_index = 0;
    double variance = 0.0;
    double constraint_residual = 0.0;
    bool feasible = false;
};

// h_A = drift*z + gamma*variance/2 - cost - k_a*y + state reward
double running_reward_full(const ModelSpec& model, const StatePoint& p, double gamma,
                           std::span<const double> u);
// h°_A, the same without the gamma term
double running_reward_constrained(const ModelSpec& model, const StatePoint& p,
                                  std::span<const double> u);

namespace detail {
inline double reward(const CoefficientEval& c, const StatePoint& p, double gamma,
                     double state_reward) {
    return c.drift * p.z + 0.5 * gamma * c.variance - c.cost - c.k_a * p.y + state_reward;
}
} // namespace detail

HamiltonianEval hamiltonian_full(const ModelSpec& model, const StatePoint& p, double gamma,
                                 const ControlGrid& grid);

HamiltonianEval hamiltonian_constrained(const ModelSpec& model, const StatePoint& p, double S,
                                        const ControlGrid& grid, double tol_S);

// hamiltonian_constrained for every S of an ascending grid in one lattice pass.
std::vector<HamiltonianEval> constrained_profile(const ModelSpec& model, const StatePoint& p,
                                                 std::span<const double> s_grid,
                                                 const ControlGrid& grid, double tol_S);

// Default band: twice the largest gap between lattice variances in [s_lo, s_hi].
double default_variance_tolerance(const ModelSpec& model, const StatePoint& p,
                                  const ControlGrid& grid, double s_lo, double s_hi);

// 2 * max |h°| change across adjacent lattice points whose variances lie in [s_lo, s_hi].
double lipschitz_step_bound(const ModelSpec& model, const StatePoint& p,
                            const ControlGrid& grid, double s_lo, double s_hi);

} // namespace vcontract
