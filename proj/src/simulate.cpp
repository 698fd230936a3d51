#include "vcontract/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "vcontract/error.hpp"
#include "vcontract/rng.hpp"
#include "parallel.hpp"

namespace vcontract {

void SimConfig::validate() const {
    require(n_paths >= 1, "n_paths must be ≥ 1");
    require(n_steps >= 1, "n_steps must be ≥ 1");
    require(qv_window >= 1, "qv_window must be ≥ 1");
    require(qv_window <= n_steps, "qv_window must be ≤ n_steps");
    require(noise_substeps >= 1, "noise_substeps must be ≥ 1");
    require(t_bucket >= 0.0 && x_bucket >= 0.0 && y_bucket >= 0.0, "bucket widths must be ≥ 0");
}

MCEstimate mc_estimate(const std::vector<double>& xs) {
    MCEstimate e;
    e.n = xs.size();
    if (xs.empty()) return e;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    e.mean = mean;
    e.std_error = xs.size() > 1 ? std::sqrt(ss / double(xs.size() - 1) / double(xs.size())) : 0.0;
    return e;
}

double pooled_std_error(const MCEstimate& a, const MCEstimate& b) {
    return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

double agent_payoff(const ModelSpec& m, const TerminalState& s) {
    if (m.agent_utility.exponential()) return m.agent_utility(s.y - s.cost_int + s.reward_int);
    return s.k_a * s.y - s.disc_cost_int + s.disc_reward_int;
}

double principal_payoff(const ModelSpec& m, const TerminalState& s, QvSource qv) {
    const double q = qv == QvSource::realized ? s.qv_realized : s.qv;
    const double w = m.coefficients->liquidation(s.x) - s.y - m.principal_qv_weight * q -
                     s.principal_cost_int;
    return s.k_p * m.principal_utility(w);
}

MCEstimate agent_objective(const ModelSpec& m, const PathEnsemble& ens) {
    std::vector<double> xs;
    xs.reserve(ens.terminal.size());
    for (const auto& s : ens.terminal)
        if (s.feasible) xs.push_back(agent_payoff(m, s));
    return mc_estimate(xs);
}

MCEstimate principal_objective(const ModelSpec& m, const PathEnsemble& ens) {
    std::vector<double> xs;
    xs.reserve(ens.terminal.size());
    for (const auto& s : ens.terminal)
        if (s.feasible) xs.push_back(principal_payoff(m, s, ens.qv_source));
    return mc_estimate(xs);
}

namespace {

unsigned worker_count(const SimConfig& cfg, std::size_t jobs) {
    return detail::worker_count(cfg.workers, jobs);
}

template <class F>
void parallel_for(const SimConfig& cfg, std::size_t n, F&& body) {
    detail::parallel_for(cfg.workers, n, std::forward<F>(body));
}

struct CacheKey {
    std::uint64_t w[5];
    bool operator==(const CacheKey& o) const { return std::memcmp(w, o.w, sizeof(w)) == 0; }
};

struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const {
        std::uint64_t h = 0x9E3779B97F4A7C15ull;
        for (auto v : k.w) {
            h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

std::uint64_t bits(double v) {
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

struct CachedArgmax {
    std::vector<double> u;
    bool feasible = true;
};

// Maximiser of the contract's Hamiltonian, memoised on canonical states.
class MaximizerOracle {
public:
    MaximizerOracle(const ModelSpec& m, ContractForm form, const SimConfig& cfg,
                    const ControlGrid& grid, double tol_S)
        : m_(m), form_(form), cfg_(cfg), grid_(grid), tol_S_(tol_S) {}

    const CachedArgmax& get(double t, double x, double y, double z, double par) {
        const auto& tr = m_.traits;
        double tc = 0.0, xc = m_.x0, yc = 0.0;
        std::int64_t tb = 0, xb = 0, yb = 0;
        bool cacheable = true;
        if (tr.time_dependent) {
            if (cfg_.t_bucket > 0.0) {
                tb = static_cast<std::int64_t>(std::floor(t / cfg_.t_bucket));
                tc = (double(tb) + 0.5) * cfg_.t_bucket;
            } else {
                tc = t;
                cacheable = false;
            }
        }
        if (tr.state_dependent) {
            if (cfg_.x_bucket > 0.0) {
                xb = static_cast<std::int64_t>(std::floor(x / cfg_.x_bucket));
                xc = (double(xb) + 0.5) * cfg_.x_bucket;
            } else {
                xc = x;
                cacheable = false;
            }
        }
        if (tr.discount_depends_on_control) {
            if (cfg_.y_bucket > 0.0) {
                yb = static_cast<std::int64_t>(std::floor(y / cfg_.y_bucket));
                yc = (double(yb) + 0.5) * cfg_.y_bucket;
            } else {
                yc = y;
                cacheable = false;
            }
        }
        if (!cacheable) {
            scratch_ = compute(tc, xc, yc, z, par);
            return scratch_;
        }
        CacheKey key{{bits(z), bits(par), std::uint64_t(tb), std::uint64_t(xb), std::uint64_t(yb)}};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        if (cache_.size() > (std::size_t(1) << 20)) cache_.clear();
        return cache_.emplace(key, compute(tc, xc, yc, z, par)).first->second;
    }

private:
    CachedArgmax compute(double t, double x, double y, double z, double par) const {
        const StatePoint p{t, x, y, z};
        CachedArgmax out;
        if (form_ == ContractForm::cpt) {
            out.u = hamiltonian_full(m_, p, par, grid_).argmax;
        } else {
            const auto h = hamiltonian_constrained(m_, p, par, grid_, tol_S_);
            out.feasible = h.feasible;
            out.u = h.argmax;
        }
        return out;
    }

    const ModelSpec& m_;
    ContractForm form_;
    const SimConfig& cfg_;
    const ControlGrid& grid_;
    double tol_S_;
    std::unordered_map<CacheKey, CachedArgmax, CacheKeyHash> cache_;
    CachedArgmax scratch_;
};

struct RunSpec {
    ContractForm form;
    double y0;
    const Policy* z;
    const Policy* par; // Gamma or Sigma
    double tol_S;
};

PathEnsemble run(const ModelSpec& m, const RunSpec& rs, const SimConfig& cfg,
                 const ControlGrid& grid, const Effort& effort) {
    cfg.validate();
    require(grid.size() > 0, "control grid is empty");
    require(grid.dim() == m.control_dim(), "control grid dimension does not match the model");
    if (effort.fixed) require(m.in_box(*effort.fixed), "fixed effort outside the control box");
    if (rs.form == ContractForm::fb) require(rs.tol_S > 0.0, "tol_S must be > 0");

    const std::size_t N = cfg.n_steps;
    const std::size_t sub = cfg.noise_substeps;
    const int n = m.noise_dim;
    const double T = m.horizon;
    const double dt = T / double(N);
    const double sub_scale = std::sqrt(dt / double(sub));
    const bool cara = m.agent_utility.exponential();
    const double ga = m.agent_utility.risk_aversion;
    const bool realized = cfg.qv_source == QvSource::realized;

    PathEnsemble ens;
    ens.form = rs.form;
    ens.qv_source = cfg.qv_source;
    ens.dt = dt;
    ens.y_start = cara ? m.agent_utility.inverse(rs.y0) : rs.y0;
    ens.time.resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) ens.time[k] = double(k) * dt;
    ens.time[N] = T;
    ens.terminal.resize(cfg.n_paths);
    const std::size_t n_trace = std::min(cfg.trace_paths, cfg.n_paths);
    ens.traces.resize(n_trace);

    const unsigned w = worker_count(cfg, cfg.n_paths);
    std::vector<std::unique_ptr<MaximizerOracle>> oracles;
    for (unsigned k = 0; k < std::max(1u, w); ++k)
        oracles.push_back(std::make_unique<MaximizerOracle>(m, rs.form, cfg, grid, rs.tol_S));

    parallel_for(cfg, cfg.n_paths, [&](unsigned worker, std::size_t path) {
        MaximizerOracle& oracle = *oracles[worker];
        NormalStream rng(cfg.master_seed, path, cfg.stream_offset);
        PathTrace* tr = path < n_trace ? &ens.traces[path] : nullptr;
        if (tr) {
            for (auto* v : {&tr->x, &tr->y, &tr->qv, &tr->qv_realized, &tr->cost, &tr->k_a, &tr->k_p})
                v->reserve(N + 1);
            tr->variance.reserve(N);
            tr->effort.reserve(N);
        }
        TerminalState s;
        double X = m.x0, Y = ens.y_start;
        auto record = [&] {
            if (!tr) return;
            tr->x.push_back(X);
            tr->y.push_back(Y);
            tr->qv.push_back(s.qv);
            tr->qv_realized.push_back(s.qv_realized);
            tr->cost.push_back(s.cost_int);
            tr->k_a.push_back(s.k_a);
            tr->k_p.push_back(s.k_p);
        };
        record();
        CoefficientEval c, co;
        c.noise_dim = co.noise_dim = n;
        double dw[kMaxNoiseDim];
        for (std::size_t k = 0; k < N; ++k) {
            const double t = ens.time[k];
            const double z = (*rs.z)(t, X, Y);
            const double par = (*rs.par)(t, X, Y);
            const CachedArgmax& opt = oracle.get(t, X, Y, z, par);
            if (!opt.feasible) {
                s.feasible = false;
                s.infeasible_step = static_cast<std::int64_t>(k);
                break;
            }
            const double r = m.coefficients->state_reward(t, X);
            const StatePoint pt{t, X, Y, z};
            const double g_eff = rs.form == ContractForm::cpt ? par : 0.0;
            m.evaluate(t, X, opt.u.data(), co);
            const double H = detail::reward(co, pt, g_eff, r);
            const double* u = effort.fixed ? effort.fixed->data() : opt.u.data();
            if (effort.fixed) m.evaluate(t, X, u, c);
            else c = co;

            for (int i = 0; i < n; ++i) dw[i] = 0.0;
            for (std::size_t j = 0; j < sub; ++j)
                for (int i = 0; i < n; ++i) dw[i] += rng.next();
            double dX = c.drift * dt;
            for (int i = 0; i < n; ++i) dX += c.diffusion[i] * (dw[i] * sub_scale);
            const double dqm = c.variance * dt;
            const double dqr = dX * dX;
            const double dq = realized ? dqr : dqm;
            double dY = -H * dt + z * dX + 0.5 * g_eff * dq;
            if (cara) dY += 0.5 * ga * z * z * dq;

            s.cost_int += c.cost * dt;
            s.disc_cost_int += s.k_a * c.cost * dt;
            s.reward_int += r * dt;
            s.disc_reward_int += s.k_a * r * dt;
            s.principal_cost_int += m.coefficients->principal_running_cost(t, X, c.variance) * dt;
            s.k_a *= std::exp(-c.k_a * dt);
            s.k_p *= std::exp(-m.coefficients->principal_discount(t, X) * dt);
            X += dX;
            Y += dY;
            s.qv += dqm;
            s.qv_realized += dqr;
            if (!std::isfinite(X) || !std::isfinite(Y) || !std::isfinite(s.cost_int)) {
                std::ostringstream os;
                os << "non-finite state on path " << path << " at step " << k + 1;
                throw NumericalError(os.str());
            }
            if (tr) {
                tr->variance.push_back(c.variance);
                tr->effort.push_back(u[0]);
            }
            record();
        }
        if (tr) {
            // frozen paths keep their last state
            while (tr->x.size() < N + 1) record();
            while (tr->variance.size() < N) {
                tr->variance.push_back(0.0);
                tr->effort.push_back(0.0);
            }
        }
        s.x = X;
        s.y = Y;
        ens.terminal[path] = s;
    });
    for (const auto& s : ens.terminal)
        if (!s.feasible) ++ens.n_infeasible;
    return ens;
}

} // namespace

PathEnsemble simulate_cpt(const ModelSpec& model, const ContractCPT& contract,
                          const SimConfig& cfg, const ControlGrid& grid, const Effort& effort) {
    const RunSpec rs{ContractForm::cpt, contract.y0, &contract.z, &contract.gamma, 0.0};
    return run(model, rs, cfg, grid, effort);
}

PathEnsemble simulate_fb(const ModelSpec& model, const ContractFB& contract,
                         const SimConfig& cfg, const ControlGrid& grid, double tol_S,
                         const Effort& effort) {
    if (contract.sigma.is_constant())
        require(contract.sigma.constant_value() >= 0.0, "sigma policy must be ≥ 0");
    const RunSpec rs{ContractForm::fb, contract.y0, &contract.z, &contract.sigma, tol_S};
    return run(model, rs, cfg, grid, effort);
}

QvSeries realized_qv_density(const PathEnsemble& ens, std::size_t path_index,
                             std::size_t qv_window) {
    require(path_index < ens.traces.size(), "path " + std::to_string(path_index) + " has no stored trace");
    const auto& x = ens.traces[path_index].x;
    const std::size_t N = x.size() - 1;
    require(qv_window >= 1, "qv_window must be ≥ 1");
    require(qv_window <= N, "qv_window exceeds the available history");
    QvSeries out;
    double sum = 0.0;
    auto sq = [&](std::size_t j) {
        const double d = x[j + 1] - x[j];
        return d * d;
    };
    for (std::size_t j = 0; j < qv_window; ++j) sum += sq(j);
    const double width = double(qv_window) * ens.dt;
    for (std::size_t k = qv_window;; ++k) {
        out.time.push_back(ens.time[k]);
        out.estimate.push_back(std::max(0.0, sum) / width);
        if (k == N) break;
        sum += sq(k) - sq(k - qv_window);
    }
    return out;
}

} // namespace vcontract
