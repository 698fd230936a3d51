#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vcontract/hamiltonian.hpp"

namespace vcontract {

struct GammaGrid {
    double lo = -50.0;
    double hi = 10.0;
    std::size_t count = 60001; // step 1e-3

    double step() const { return count > 1 ? (hi - lo) / double(count - 1) : 0.0; }
    std::vector<double> values() const;
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

// Upper concave hull of the lattice cloud {(variance(u), h°(u))}.
// max over vertices of h° + gamma*v/2 equals hamiltonian_full(gamma).
class ConjugateProfile {
public:
    static ConjugateProfile build(const ModelSpec& model, const StatePoint& p,
                                  const ControlGrid& grid);

    double hamiltonian(double gamma) const;
    // gammas ascending
    std::vector<double> hamiltonian(std::span<const double> gammas) const;

    const std::vector<double>& variances() const { return v_; }
    const std::vector<double>& rewards() const { return f_; }

private:
    std::vector<double> v_;
    std::vector<double> f_;
};

struct BiconjugateResult {
    double value = 0.0;
    double gamma_star = 0.0;
    // minimiser sits on a grid end while the objective still decreases there
    bool clamped = false;
};

double conjugate_from_constrained(const ModelSpec& model, const StatePoint& p, double gamma,
                                  std::span<const double> s_grid, const ControlGrid& grid,
                                  double tol_S);

// Error bound for conjugate_from_constrained against hamiltonian_full on the same lattice.
double conjugate_error_bound(double gamma, double tol_S, double s_spacing);

BiconjugateResult biconjugate(const ModelSpec& model, const StatePoint& p, double S,
                              std::span<const double> gamma_grid, const ControlGrid& grid);
BiconjugateResult biconjugate(const ConjugateProfile& profile, double S,
                              std::span<const double> gamma_grid);
// Same, given H values precomputed on the gamma grid.
BiconjugateResult biconjugate_from_values(std::span<const double> gamma_grid,
                                          std::span<const double> h_values, double S);

double sigma_from_gamma(const ModelSpec& model, const StatePoint& p, double gamma,
                        const ControlGrid& grid);
double gamma_from_sigma(const ModelSpec& model, const StatePoint& p, double S,
                        std::span<const double> gamma_grid, const ControlGrid& grid);

struct DualityRow {
    double S = 0.0;
    double h_constrained = 0.0;
    double biconjugate = 0.0;
    double gap = 0.0;
    double gamma_star = 0.0;
    bool clamped = false;
};

struct DualityReport {
    std::vector<DualityRow> rows;
    std::vector<double> skipped_S;
    double max_gap = 0.0;
    double witness_S = 0.0;
    double min_gap = 0.0;
    double eps_grid = 0.0;
    double tol_gap = 0.0;
    double tol_S = 0.0;
    std::size_t n_clamped = 0;
    bool holds = false;

    // convenience views over rows
    std::vector<double> s_grid() const;
    std::vector<double> gap() const;
    std::vector<double> gamma_star() const;
};

struct DualityOptions {
    std::optional<double> tol_S;
    std::optional<double> tol_gap;
    // compute eps_grid from a half-resolution lattice
    bool estimate_eps = true;
};

DualityReport duality_report(const ModelSpec& model, const StatePoint& p,
                             std::span<const double> s_grid,
                             std::span<const double> gamma_grid, const ControlGrid& grid,
                             const DualityOptions& opts = {});

} // namespace vcontract
