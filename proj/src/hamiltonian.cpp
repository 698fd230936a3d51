#include "vcontract/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "vcontract/error.hpp"

namespace vcontract {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_grid(const ModelSpec& model, const ControlGrid& grid) {
    require(grid.size() > 0, "control grid is empty");
    require(grid.dim() == model.control_dim(), "control grid dimension does not match the model");
}

} // namespace

double running_reward_full(const ModelSpec& model, const StatePoint& p, double gamma,
                           std::span<const double> u) {
    const CoefficientEval c = eval_coefficients(model, p.t, p.x, u);
    return detail::reward(c, p, gamma, model.coefficients->state_reward(p.t, p.x));
}

double running_reward_constrained(const ModelSpec& model, const StatePoint& p,
                                  std::span<const double> u) {
    return running_reward_full(model, p, 0.0, u);
}

HamiltonianEval hamiltonian_full(const ModelSpec& model, const StatePoint& p, double gamma,
                                 const ControlGrid& grid) {
    check_grid(model, grid);
    const double r = model.coefficients->state_reward(p.t, p.x);
    double best = kNegInf, best_v = 0.0;
    std::size_t best_i = 0;
    bool found = false;
    CoefficientEval c;
    c.noise_dim = model.noise_dim;
    grid.for_each([&](std::size_t flat, const double* u) {
        model.evaluate(p.t, p.x, u, c);
        const double h = detail::reward(c, p, gamma, r);
        if (!found || h > best) {
            best = std::isnan(h) ? kNegInf : h;
            best_i = flat;
            best_v = c.variance;
            found = true;
        }
    });
    HamiltonianEval out;
    out.value = best;
    out.argmax_index = best_i;
    out.argmax = grid.point(best_i);
    out.variance = best_v;
    out.feasible = true;
    out.constraint_residual = 0.0;
    return out;
}

HamiltonianEval hamiltonian_constrained(const ModelSpec& model, const StatePoint& p, double S,
                                        const ControlGrid& grid, double tol_S) {
    const double s[] = {S};
    return constrained_profile(model, p, s, grid, tol_S).front();
}

std::vector<HamiltonianEval> constrained_profile(const ModelSpec& model, const StatePoint& p,
                                                 std::span<const double> s_grid,
                                                 const ControlGrid& grid, double tol_S) {
    check_grid(model, grid);
    require(!s_grid.empty(), "S grid is empty");
    require(tol_S > 0.0, "tol_S must be > 0");
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        require(std::isfinite(s_grid[i]) && s_grid[i] >= 0.0, "target variances must be >= 0");
        require(i == 0 || s_grid[i] >= s_grid[i - 1], "S grid must be ascending");
    }
    const std::size_t n = s_grid.size();
    std::vector<double> best(n, kNegInf), best_v(n, 0.0);
    std::vector<std::size_t> best_i(n, 0);
    std::vector<char> hit(n, 0);
    const double r = model.coefficients->state_reward(p.t, p.x);
    CoefficientEval c;
    c.noise_dim = model.noise_dim;
    grid.for_each([&](std::size_t flat, const double* u) {
        model.evaluate(p.t, p.x, u, c);
        const double v = c.variance;
        auto it = std::lower_bound(s_grid.begin(), s_grid.end(), v - tol_S);
        if (it == s_grid.end() || *it > v + tol_S) return;
        const double h = detail::reward(c, p, 0.0, r);
        if (!(h > kNegInf)) return;
        for (; it != s_grid.end() && *it <= v + tol_S; ++it) {
            const std::size_t k = static_cast<std::size_t>(it - s_grid.begin());
            if (std::abs(v - *it) > tol_S) continue;
            if (!hit[k] || h > best[k]) {
                hit[k] = 1;
                best[k] = h;
                best_i[k] = flat;
                best_v[k] = v;
            }
        }
    });
    std::vector<HamiltonianEval> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!hit[k]) continue;
        out[k].value = best[k];
        out[k].argmax_index = best_i[k];
        out[k].argmax = grid.point(best_i[k]);
        out[k].variance = best_v[k];
        out[k].constraint_residual = std::abs(best_v[k] - s_grid[k]);
        out[k].feasible = true;
    }
    return out;
}

double default_variance_tolerance(const ModelSpec& model, const StatePoint& p,
                                  const ControlGrid& grid, double s_lo, double s_hi) {
    const double gap = variance_spacing(model, p.t, p.x, grid, s_lo, s_hi);
    return std::max(2.0 * gap, 1e-12);
}

double lipschitz_step_bound(const ModelSpec& model, const StatePoint& p,
                            const ControlGrid& grid, double s_lo, double s_hi) {
    check_grid(model, grid);
    std::vector<double> h(grid.size()), v(grid.size());
    const double r = model.coefficients->state_reward(p.t, p.x);
    CoefficientEval c;
    c.noise_dim = model.noise_dim;
    grid.for_each([&](std::size_t flat, const double* u) {
        model.evaluate(p.t, p.x, u, c);
        h[flat] = detail::reward(c, p, 0.0, r);
        v[flat] = c.variance;
    });
    const auto& counts = grid.counts();
    std::vector<std::size_t> stride(counts.size(), 1);
    for (std::size_t a = counts.size() - 1; a-- > 0;) stride[a] = stride[a + 1] * counts[a + 1];
    auto ok = [&](std::size_t i) {
        return std::isfinite(h[i]) && v[i] >= s_lo && v[i] <= s_hi;
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!ok(i)) continue;
        for (std::size_t a = 0; a < counts.size(); ++a) {
            if ((i / stride[a]) % counts[a] + 1 >= counts[a]) continue;
            const std::size_t j = i + stride[a];
            if (ok(j)) worst = std::max(worst, std::abs(h[j] - h[i]));
        }
    }
    return 2.0 * worst;
}

} // namespace vcontract
