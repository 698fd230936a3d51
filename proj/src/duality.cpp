#include "vcontract/duality.hpp"

#include <algorithm>
#include <cmath>

#include "vcontract/error.hpp"

namespace vcontract {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_ascending(std::span<const double> g, const char* what) {
    require(!g.empty(), std::string(what) + " is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
        require(std::isfinite(g[i]), std::string(what) + " must be finite");
        require(i == 0 || g[i] > g[i - 1], std::string(what) + " must be strictly ascending");
    }
}

struct Pt {
    double v, f;
};

// upper hull of points sorted by v ascending, f descending within equal v
void upper_hull(const std::vector<Pt>& pts, std::vector<Pt>& hull) {
    hull.clear();
    for (const Pt& p : pts) {
        if (!hull.empty() && p.v == hull.back().v) continue;
        while (hull.size() >= 2) {
            const Pt& o = hull[hull.size() - 2];
            const Pt& a = hull.back();
            const double cross = (a.v - o.v) * (p.f - o.f) - (a.f - o.f) * (p.v - o.v);
            if (cross >= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
}

bool by_v(const Pt& a, const Pt& b) { return a.v < b.v || (a.v == b.v && a.f > b.f); }

} // namespace

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
    require(count >= 1, "grid needs at least one point");
    require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "grid bounds must satisfy lo <= hi");
    if (count == 1) return {lo};
    std::vector<double> g(count);
    const double step = (hi - lo) / double(count - 1);
    for (std::size_t i = 0; i < count; ++i) g[i] = lo + double(i) * step;
    g.back() = hi;
    return g;
}

std::vector<double> GammaGrid::values() const { return uniform_grid(lo, hi, count); }

ConjugateProfile ConjugateProfile::build(const ModelSpec& model, const StatePoint& p,
                                         const ControlGrid& grid) {
    require(grid.size() > 0, "control grid is empty");
    require(grid.dim() == model.control_dim(), "control grid dimension does not match the model");
    const double r = model.coefficients->state_reward(p.t, p.x);
    constexpr std::size_t kChunk = std::size_t(1) << 20;
    std::vector<Pt> chunk, merged, hull, part;
    chunk.reserve(std::min(kChunk, grid.size()));
    CoefficientEval c;
    c.noise_dim = model.noise_dim;
    for (std::size_t begin = 0; begin < grid.size(); begin += kChunk) {
        const std::size_t end = std::min(grid.size(), begin + kChunk);
        chunk.clear();
        grid.for_range(begin, end, [&](std::size_t, const double* u) {
            model.evaluate(p.t, p.x, u, c);
            const double f = detail::reward(c, p, 0.0, r);
            if (std::isfinite(f) && std::isfinite(c.variance)) chunk.push_back({c.variance, f});
        });
        std::sort(chunk.begin(), chunk.end(), by_v);
        upper_hull(chunk, part);
        merged.resize(hull.size() + part.size());
        std::merge(hull.begin(), hull.end(), part.begin(), part.end(), merged.begin(), by_v);
        upper_hull(merged, hull);
    }
    if (hull.empty()) throw NumericalError("no lattice point has a finite reward");
    ConjugateProfile out;
    for (const Pt& q : hull) {
        out.v_.push_back(q.v);
        out.f_.push_back(q.f);
    }
    return out;
}

double ConjugateProfile::hamiltonian(double gamma) const {
    double best = kNegInf;
    for (std::size_t i = 0; i < v_.size(); ++i) best = std::max(best, f_[i] + 0.5 * gamma * v_[i]);
    return best;
}

std::vector<double> ConjugateProfile::hamiltonian(std::span<const double> gammas) const {
    std::vector<double> out(gammas.size());
    std::size_t j = 0;
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        const double g = gammas[k];
        require(k == 0 || g >= gammas[k - 1], "gamma grid must be ascending");
        while (j + 1 < v_.size() && f_[j + 1] + 0.5 * g * v_[j + 1] >= f_[j] + 0.5 * g * v_[j]) ++j;
        out[k] = f_[j] + 0.5 * g * v_[j];
    }
    return out;
}

double conjugate_from_constrained(const ModelSpec& model, const StatePoint& p, double gamma,
                                  std::span<const double> s_grid, const ControlGrid& grid,
                                  double tol_S) {
    const auto prof = constrained_profile(model, p, s_grid, grid, tol_S);
    double best = kNegInf;
    bool any = false;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        if (!prof[i].feasible) continue;
        any = true;
        best = std::max(best, prof[i].value + 0.5 * gamma * s_grid[i]);
    }
    if (!any) throw NumericalError("no S in the grid is achievable");
    return best;
}

double conjugate_error_bound(double gamma, double tol_S, double s_spacing) {
    return 0.5 * std::abs(gamma) * std::max(tol_S, 0.5 * s_spacing);
}

BiconjugateResult biconjugate_from_values(std::span<const double> gammas,
                                          std::span<const double> h, double S) {
    require(!gammas.empty(), "gamma grid is empty");
    require(gammas.size() == h.size(), "gamma grid and values differ in length");
    const std::size_t n = gammas.size();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::min(m, h[i] - 0.5 * gammas[i] * S);
    const double tol = 1e-12 * std::max(1.0, std::abs(m));
    auto F = [&](std::size_t i) { return h[i] - 0.5 * gammas[i] * S; };
    std::size_t k = 0;
    while (k < n && !(F(k) <= m + tol)) ++k;
    std::size_t k2 = n - 1;
    while (k2 > k && !(F(k2) <= m + tol)) --k2;
    BiconjugateResult out;
    out.value = m;
    // S on a hull vertex: every gamma in the subgradient interval is a minimiser.
    // Take its centre, or its inner end when it runs into the grid boundary.
    if (k == 0 && k2 + 1 < n) out.gamma_star = gammas[k2];
    else if (k2 + 1 == n && k > 0) out.gamma_star = gammas[k];
    else out.gamma_star = 0.5 * (gammas[k] + gammas[k2]);
    if (n >= 2) {
        if (k == 0 && F(0) < F(1) - tol) out.clamped = true;
        if (F(n - 1) <= m + tol && F(n - 1) < F(n - 2) - tol) out.clamped = true;
    }
    return out;
}

BiconjugateResult biconjugate(const ConjugateProfile& profile, double S,
                              std::span<const double> gamma_grid) {
    check_ascending(gamma_grid, "gamma grid");
    const auto h = profile.hamiltonian(gamma_grid);
    return biconjugate_from_values(gamma_grid, h, S);
}

BiconjugateResult biconjugate(const ModelSpec& model, const StatePoint& p, double S,
                              std::span<const double> gamma_grid, const ControlGrid& grid) {
    check_ascending(gamma_grid, "gamma grid");
    return biconjugate(ConjugateProfile::build(model, p, grid), S, gamma_grid);
}

double sigma_from_gamma(const ModelSpec& model, const StatePoint& p, double gamma,
                        const ControlGrid& grid) {
    return hamiltonian_full(model, p, gamma, grid).variance;
}

double gamma_from_sigma(const ModelSpec& model, const StatePoint& p, double S,
                        std::span<const double> gamma_grid, const ControlGrid& grid) {
    return biconjugate(model, p, S, gamma_grid, grid).gamma_star;
}

std::vector<double> DualityReport::s_grid() const {
    std::vector<double> o;
    for (const auto& r : rows) o.push_back(r.S);
    return o;
}
std::vector<double> DualityReport::gap() const {
    std::vector<double> o;
    for (const auto& r : rows) o.push_back(r.gap);
    return o;
}
std::vector<double> DualityReport::gamma_star() const {
    std::vector<double> o;
    for (const auto& r : rows) o.push_back(r.gamma_star);
    return o;
}

namespace {

std::vector<DualityRow> report_rows(const ModelSpec& model, const StatePoint& p,
                                    std::span<const double> s_grid,
                                    std::span<const double> gammas, const ControlGrid& grid,
                                    double tol_S, std::vector<double>* skipped) {
    const auto prof = constrained_profile(model, p, s_grid, grid, tol_S);
    const auto h = ConjugateProfile::build(model, p, grid).hamiltonian(gammas);
    std::vector<DualityRow> rows;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        if (!prof[i].feasible) {
            if (skipped) skipped->push_back(s_grid[i]);
            continue;
        }
        const auto b = biconjugate_from_values(gammas, h, s_grid[i]);
        DualityRow r;
        r.S = s_grid[i];
        r.h_constrained = prof[i].value;
        r.biconjugate = b.value;
        r.gap = b.value - prof[i].value;
        r.gamma_star = b.gamma_star;
        r.clamped = b.clamped;
        rows.push_back(r);
    }
    return rows;
}

} // namespace

DualityReport duality_report(const ModelSpec& model, const StatePoint& p,
                             std::span<const double> s_grid,
                             std::span<const double> gamma_grid, const ControlGrid& grid,
                             const DualityOptions& opts) {
    check_ascending(s_grid, "S grid");
    check_ascending(gamma_grid, "gamma grid");
    require(s_grid.front() >= 0.0, "S grid must be >= 0");
    DualityReport rep;
    rep.tol_S = opts.tol_S ? *opts.tol_S
                           : default_variance_tolerance(model, p, grid, s_grid.front(), s_grid.back());
    require(rep.tol_S > 0.0, "tol_S must be > 0");
    rep.rows = report_rows(model, p, s_grid, gamma_grid, grid, rep.tol_S, &rep.skipped_S);
    if (rep.rows.empty()) throw NumericalError("no achievable S in the grid");

    bool any = false;
    for (const auto& r : rep.rows) {
        if (r.clamped) {
            ++rep.n_clamped;
            continue;
        }
        if (!any || r.gap > rep.max_gap) {
            rep.max_gap = r.gap;
            rep.witness_S = r.S;
        }
        rep.min_gap = any ? std::min(rep.min_gap, r.gap) : r.gap;
        any = true;
    }
    if (!any) throw NumericalError("every achievable S hit the gamma clamp; widen the gamma range");

    if (opts.estimate_eps) {
        const ControlGrid coarse = grid.coarsened();
        if (coarse.size() < grid.size()) {
            const auto crow = report_rows(model, p, s_grid, gamma_grid, coarse, 2.0 * rep.tol_S, nullptr);
            std::size_t j = 0;
            for (const auto& r : rep.rows) {
                while (j < crow.size() && crow[j].S < r.S) ++j;
                if (j == crow.size()) break;
                if (crow[j].S != r.S || r.clamped || crow[j].clamped) continue;
                rep.eps_grid = std::max(rep.eps_grid, std::abs(r.gap - crow[j].gap));
            }
        }
    }
    rep.tol_gap = opts.tol_gap ? *opts.tol_gap : std::max(5.0 * rep.eps_grid, 1e-9);
    rep.holds = rep.max_gap <= rep.tol_gap;
    return rep;
}

} // namespace vcontract
