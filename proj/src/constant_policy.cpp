#include <cmath>

#include "vcontract/error.hpp"
#include "vcontract/rng.hpp"
#include "vcontract/simulate.hpp"
#include "parallel.hpp"

namespace vcontract {

bool ConstantPolicyEvaluator::eligible(const ModelSpec& m) {
    const auto& t = m.traits;
    return !t.time_dependent && !t.state_dependent && t.zero_discounts && t.affine_state_terms;
}

ConstantPolicyEvaluator::ConstantPolicyEvaluator(const ModelSpec& model, const SimConfig& cfg)
    : model_(&model), cfg_(cfg), n_paths_(cfg.n_paths), n_(model.noise_dim) {
    cfg.validate();
    require(eligible(model), "model is not eligible for the constant-policy evaluator");
    const std::size_t N = cfg.n_steps, sub = cfg.noise_substeps;
    const int n = n_;
    const double dt = model.horizon / double(N);
    const double sub_scale = std::sqrt(dt / double(sub));
    w_.assign(n_paths_ * n, 0.0);
    a_.assign(n_paths_ * n, 0.0);
    q_.assign(n_paths_ * n * n, 0.0);
    detail::parallel_for(cfg.workers, n_paths_, [&](unsigned, std::size_t p) {
        NormalStream rng(cfg.master_seed, p, cfg.stream_offset);
        double* W = &w_[p * n];
        double* A = &a_[p * n];
        double* Q = &q_[p * n * n];
        double dw[kMaxNoiseDim];
        for (std::size_t k = 0; k < N; ++k) {
            for (int i = 0; i < n; ++i) dw[i] = 0.0;
            for (std::size_t j = 0; j < sub; ++j)
                for (int i = 0; i < n; ++i) dw[i] += rng.next();
            for (int i = 0; i < n; ++i) {
                dw[i] *= sub_scale;
                A[i] += W[i] * dt;
                W[i] += dw[i];
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) Q[i * n + j] += dw[i] * dw[j];
        }
    });
}

template <class F>
void ConstantPolicyEvaluator::for_each_terminal(ContractForm form, double y0, double z,
                                                double gamma, double hamiltonian,
                                                const double* u, F&& f) const {
    const ModelSpec& m = *model_;
    require(m.in_box(std::span<const double>(u, m.control_dim())), "control outside the control box");
    CoefficientEval c;
    c.noise_dim = n_;
    m.evaluate(0.0, m.x0, u, c);
    const int n = n_;
    const double N = double(cfg_.n_steps);
    const double dt = m.horizon / N;
    const double Tn = N * dt;
    const bool cara = m.agent_utility.exponential();
    const double ga = m.agent_utility.risk_aversion;
    const double y_start = cara ? m.agent_utility.inverse(y0) : y0;
    const double g_eff = form == ContractForm::cpt ? gamma : 0.0;
    const bool realized = cfg_.qv_source == QvSource::realized;
    const double r0 = m.coefficients->state_reward(0.0, 0.0);
    const double r1 = m.coefficients->state_reward(0.0, 1.0) - r0;
    const double p0 = m.coefficients->principal_running_cost(0.0, 0.0, c.variance);
    const double p1 = m.coefficients->principal_running_cost(0.0, 1.0, c.variance) - p0;
    const double b = c.drift;
    const double* s = c.diffusion.data();

    for (std::size_t p = 0; p < n_paths_; ++p) {
        const double* W = &w_[p * n];
        const double* A = &a_[p * n];
        const double* Q = &q_[p * n * n];
        double sW = 0.0, sA = 0.0, sQs = 0.0;
        for (int i = 0; i < n; ++i) {
            sW += s[i] * W[i];
            sA += s[i] * A[i];
            for (int j = 0; j < n; ++j) sQs += s[i] * Q[i * n + j] * s[j];
        }
        TerminalState t;
        t.x = m.x0 + b * Tn + sW;
        const double int_x = m.x0 * Tn + b * dt * dt * N * (N - 1.0) * 0.5 + sA;
        t.qv = c.variance * Tn;
        t.qv_realized = N * b * b * dt * dt + 2.0 * b * dt * sW + sQs;
        const double dq = realized ? t.qv_realized : t.qv;
        const double int_r = r0 * Tn + r1 * int_x;
        t.y = y_start - hamiltonian * Tn - int_r + z * (t.x - m.x0) + 0.5 * g_eff * dq;
        if (cara) t.y += 0.5 * ga * z * z * dq;
        t.cost_int = c.cost * Tn;
        t.disc_cost_int = t.cost_int;
        t.reward_int = int_r;
        t.disc_reward_int = int_r;
        t.principal_cost_int = p0 * Tn + p1 * int_x;
        f(t);
    }
}

std::vector<TerminalState> ConstantPolicyEvaluator::terminal(ContractForm form, double y0, double z,
                                                             double gamma, double hamiltonian,
                                                             const double* u) const {
    std::vector<TerminalState> out;
    out.reserve(n_paths_);
    for_each_terminal(form, y0, z, gamma, hamiltonian, u, [&](const TerminalState& t) { out.push_back(t); });
    return out;
}

namespace {

struct Welford {
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    MCEstimate estimate() const {
        MCEstimate e;
        e.n = n;
        e.mean = mean;
        e.std_error = n > 1 ? std::sqrt(m2 / double(n - 1) / double(n)) : 0.0;
        return e;
    }
};

} // namespace

MCEstimate ConstantPolicyEvaluator::principal_objective(ContractForm form, double y0, double z,
                                                        double gamma, double hamiltonian,
                                                        const double* u) const {
    Welford acc;
    for_each_terminal(form, y0, z, gamma, hamiltonian, u, [&](const TerminalState& t) {
        acc.add(principal_payoff(*model_, t, cfg_.qv_source));
    });
    return acc.estimate();
}

MCEstimate ConstantPolicyEvaluator::agent_objective(ContractForm form, double y0, double z,
                                                    double gamma, double hamiltonian,
                                                    const double* u) const {
    Welford acc;
    for_each_terminal(form, y0, z, gamma, hamiltonian, u,
                      [&](const TerminalState& t) { acc.add(agent_payoff(*model_, t)); });
    return acc.estimate();
}

} // namespace vcontract
