#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vcontract/hamiltonian.hpp"

namespace vcontract {

// Feedback policy (t, x, y) -> value, with a fast path for constants.
class Policy {
public:
    using Fn = std::function<double(double, double, double)>;

    Policy() = default;
    Policy(Fn fn) : fn_(std::move(fn)), constant_(std::nullopt) {}
    static Policy constant(double v) {
        Policy p;
        p.constant_ = v;
        return p;
    }

    double operator()(double t, double x, double y) const {
        return constant_ ? *constant_ : fn_(t, x, y);
    }
    bool is_constant() const { return constant_.has_value(); }
    double constant_value() const { return constant_.value_or(0.0); }

private:
    Fn fn_;
    std::optional<double> constant_{0.0};
};

struct ContractCPT {
    double y0 = 0.0;
    Policy z;
    Policy gamma;
};

struct ContractFB {
    double y0 = 0.0;
    Policy z;
    Policy sigma;
};

enum class ContractForm { cpt, fb };
// d<X> used inside contracts and payoffs: squared increments or sigma^2 dt
enum class QvSource { realized, model };

struct SimConfig {
    std::size_t n_paths = 1000;
    std::size_t n_steps = 1000;
    std::uint64_t master_seed = 42;
    std::size_t qv_window = 100;
    unsigned workers = 0; // 0: hardware concurrency
    std::size_t trace_paths = 8;
    std::uint32_t stream_offset = 0;
    // each step sums this many finer Brownian increments, so runs with
    // n_steps * noise_substeps fixed share one Brownian path
    std::size_t noise_substeps = 1;
    QvSource qv_source = QvSource::realized;
    // maximiser memo bucket widths for state/time dependent models; 0 disables the memo
    double t_bucket = 0.0;
    double x_bucket = 0.0;
    double y_bucket = 0.0;

    void validate() const;
};

// Played effort: the Hamiltonian maximiser or a fixed control.
struct Effort {
    std::optional<std::vector<double>> fixed;

    static Effort optimal() { return {}; }
    static Effort constant(std::vector<double> u) { return {std::move(u)}; }
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

MCEstimate mc_estimate(const std::vector<double>& samples);
double pooled_std_error(const MCEstimate& a, const MCEstimate& b);

struct TerminalState {
    double x = 0.0;
    double y = 0.0; // xi
    double qv = 0.0;
    double qv_realized = 0.0;
    double cost_int = 0.0;
    double disc_cost_int = 0.0;
    double reward_int = 0.0;
    double disc_reward_int = 0.0;
    double k_a = 1.0;
    double k_p = 1.0;
    double principal_cost_int = 0.0;
    bool feasible = true;
    std::int64_t infeasible_step = -1;
};

struct PathTrace {
    std::vector<double> x, y, qv, qv_realized, cost, k_a, k_p;
    std::vector<double> variance; // per step, model sigma^2 of the played control
    std::vector<double> effort;   // per step, first control component
};

struct PathEnsemble {
    ContractForm form = ContractForm::cpt;
    QvSource qv_source = QvSource::realized;
    double dt = 0.0;
    double y_start = 0.0; // Y_0 in money units
    std::vector<double> time;
    std::vector<PathTrace> traces; // first trace_paths paths
    std::vector<TerminalState> terminal;
    std::size_t n_infeasible = 0;
};

PathEnsemble simulate_cpt(const ModelSpec& model, const ContractCPT& contract,
                          const SimConfig& cfg, const ControlGrid& grid,
                          const Effort& effort = Effort::optimal());

PathEnsemble simulate_fb(const ModelSpec& model, const ContractFB& contract,
                         const SimConfig& cfg, const ControlGrid& grid, double tol_S,
                         const Effort& effort = Effort::optimal());

struct QvSeries {
    std::vector<double> time;
    std::vector<double> estimate;
};

QvSeries realized_qv_density(const PathEnsemble& ens, std::size_t path_index,
                             std::size_t qv_window);

double agent_payoff(const ModelSpec& model, const TerminalState& s);
double principal_payoff(const ModelSpec& model, const TerminalState& s, QvSource qv);

MCEstimate agent_objective(const ModelSpec& model, const PathEnsemble& ens);
MCEstimate principal_objective(const ModelSpec& model, const PathEnsemble& ens);

// Exact terminal states for constant controls and loadings, built from per-path
// Brownian sufficient statistics drawn from the same streams as the simulator.
class ConstantPolicyEvaluator {
public:
    static bool eligible(const ModelSpec& model);

    ConstantPolicyEvaluator(const ModelSpec& model, const SimConfig& cfg);

    // gamma is Gamma for the CPT form and ignored for FB; u is the played control;
    // hamiltonian is H minus the state reward, evaluated at the contract's loadings.
    std::vector<TerminalState> terminal(ContractForm form, double y0, double z, double gamma,
                                        double hamiltonian, const double* u) const;

    MCEstimate principal_objective(ContractForm form, double y0, double z, double gamma,
                                   double hamiltonian, const double* u) const;
    MCEstimate agent_objective(ContractForm form, double y0, double z, double gamma,
                               double hamiltonian, const double* u) const;

    std::size_t n_paths() const { return n_paths_; }

private:
    template <class F>
    void for_each_terminal(ContractForm form, double y0, double z, double gamma,
                           double hamiltonian, const double* u, F&& f) const;

    const ModelSpec* model_;
    SimConfig cfg_;
    std::size_t n_paths_ = 0;
    int n_ = 1;
    // per path: W_T (n), A = sum_k W_k dt (n), Q = sum dW dW^T (n*n)
    std::vector<double> w_, a_, q_;
};

} // namespace vcontract
