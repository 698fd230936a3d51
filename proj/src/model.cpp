#include "vcontract/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vcontract/error.hpp"

namespace vcontract {

double Utility::operator()(double w) const {
    if (kind == UtilityKind::linear) return w;
    return -std::exp(-risk_aversion * w);
}

double Utility::inverse(double v) const {
    if (kind == UtilityKind::linear) return v;
    require(v < 0.0, "exponential utility inverse needs a negative level");
    return -std::log(-v) / risk_aversion;
}

bool ModelSpec::in_box(std::span<const double> u, double slack) const {
    if (u.size() != control_box.size()) return false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] >= control_box[i].lo - slack && u[i] <= control_box[i].hi + slack)) return false;
    }
    return true;
}

namespace {

void check_utility(const Utility& ut, const char* who) {
    if (ut.kind == UtilityKind::exponential) {
        require(std::isfinite(ut.risk_aversion) && ut.risk_aversion > 0.0,
                std::string(who) + " risk aversion must be > 0");
    }
}

} // namespace

void validate_model(const ModelSpec& m) {
    require(std::isfinite(m.horizon) && m.horizon > 0.0, "horizon must be > 0");
    require(std::isfinite(m.x0), "x0 must be finite");
    require(m.output_dim == 1, "output_dim must be 1");
    require(m.noise_dim >= 1 && m.noise_dim <= kMaxNoiseDim,
            "noise_dim must be in [1, " + std::to_string(kMaxNoiseDim) + "]");
    require(!m.control_box.empty(), "control box is empty");
    require(m.control_box.size() <= 16, "at most 16 control axes");
    for (const auto& iv : m.control_box) {
        require(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo <= iv.hi,
                "control box intervals need finite lo <= hi");
    }
    require(m.coefficients != nullptr, "model has no coefficients");
    check_utility(m.agent_utility, "agent");
    check_utility(m.principal_utility, "principal");
    require(std::isfinite(m.reservation), "reservation must be finite");
    if (m.agent_utility.exponential()) {
        require(m.reservation < 0.0, "reservation must be < 0 under exponential utility");
    }
    require(std::isfinite(m.principal_qv_weight), "principal qv weight must be finite");
    if (!m.default_grid.empty()) {
        require(m.default_grid.size() == m.control_box.size(), "grid needs one count per control axis");
    }

    // spot checks on a coarse lattice
    std::vector<std::size_t> counts;
    for (const auto& iv : m.control_box) counts.push_back(iv.lo == iv.hi ? 1 : 5);
    ControlGrid g(m.control_box, counts);
    const double ts[] = {0.0, 0.5 * m.horizon, m.horizon};
    const double xs[] = {m.x0 - 1.0, m.x0, m.x0 + 1.0};
    CoefficientEval c;
    for (double t : ts) {
        for (double x : xs) {
            g.for_each([&](std::size_t, const double* u) {
                c.noise_dim = m.noise_dim;
                m.evaluate(t, x, u, c);
                std::ostringstream where;
                where << " at t=" << t << ", x=" << x;
                require(std::isfinite(c.drift), "drift not finite" + where.str());
                double v = 0.0;
                for (int k = 0; k < m.noise_dim; ++k) {
                    require(std::isfinite(c.diffusion[k]), "vol not finite" + where.str());
                    v += c.diffusion[k] * c.diffusion[k];
                }
                require(std::abs(v - c.variance) <= 1e-9 * std::max(1.0, v),
                        "variance does not match the diffusion row" + where.str());
                require(!std::isnan(c.cost) && c.cost >= 0.0, "cost must be >= 0" + where.str());
                require(std::isfinite(c.k_a), "agent discount not finite" + where.str());
            });
            require(std::isfinite(m.coefficients->principal_discount(t, x)),
                    "principal discount not finite");
        }
    }
}

CoefficientEval eval_coefficients(const ModelSpec& model, double t, double x,
                                  std::span<const double> u) {
    require(model.in_box(u), "control outside the control box");
    require(t >= 0.0 && t <= model.horizon, "t outside [0, T]");
    CoefficientEval c;
    c.noise_dim = model.noise_dim;
    model.evaluate(t, x, u.data(), c);
    return c;
}

ControlGrid::ControlGrid(const std::vector<Interval>& box, const std::vector<std::size_t>& counts)
    : box_(box), counts_(counts) {
    require(!box.empty(), "control grid needs at least one axis");
    require(box.size() == counts.size(), "control grid needs one count per axis");
    require(box.size() <= 16, "at most 16 control axes");
    size_ = 1;
    for (std::size_t a = 0; a < box.size(); ++a) {
        require(counts_[a] >= 1, "control grid counts must be >= 1");
        if (box[a].lo == box[a].hi) counts_[a] = 1;
        std::vector<double> ax(counts_[a]);
        const std::size_t n = counts_[a];
        for (std::size_t i = 0; i < n; ++i) {
            if (n == 1) {
                ax[i] = box[a].lo;
            } else {
                const double s = double(i) / double(n - 1);
                ax[i] = box[a].lo * (1.0 - s) + box[a].hi * s;
            }
        }
        if (n > 1) ax.back() = box[a].hi;
        axes_.push_back(std::move(ax));
        size_ *= counts_[a];
    }
}

ControlGrid ControlGrid::for_model(const ModelSpec& model) {
    if (!model.default_grid.empty()) return ControlGrid(model.control_box, model.default_grid);
    return ControlGrid(model.control_box, std::vector<std::size_t>(model.control_dim(), 201));
}

ControlGrid ControlGrid::for_model(const ModelSpec& model, const std::vector<std::size_t>& counts) {
    return ControlGrid(model.control_box, counts);
}

double ControlGrid::step(std::size_t a) const {
    if (counts_[a] < 2) return 0.0;
    return (box_[a].hi - box_[a].lo) / double(counts_[a] - 1);
}

void ControlGrid::point(std::size_t flat, double* u) const {
    require(flat < size_, "lattice index out of range");
    for (std::size_t a = axes_.size(); a-- > 0;) {
        u[a] = axes_[a][flat % counts_[a]];
        flat /= counts_[a];
    }
}

std::vector<double> ControlGrid::point(std::size_t flat) const {
    std::vector<double> u(axes_.size());
    point(flat, u.data());
    return u;
}

ControlGrid ControlGrid::coarsened() const {
    std::vector<std::size_t> c(counts_.size());
    for (std::size_t a = 0; a < c.size(); ++a) c[a] = (counts_[a] + 1) / 2;
    return ControlGrid(box_, c);
}

std::vector<VariancePoint> achievable_variance_set(const ModelSpec& model, double t, double x,
                                                   const ControlGrid& grid, double tol_S) {
    require(grid.size() > 0, "control grid is empty");
    std::vector<std::pair<double, std::size_t>> vs;
    vs.reserve(grid.size());
    CoefficientEval c;
    c.noise_dim = model.noise_dim;
    grid.for_each([&](std::size_t flat, const double* u) {
        model.evaluate(t, x, u, c);
        vs.emplace_back(c.variance, flat);
    });
    std::sort(vs.begin(), vs.end());
    std::vector<VariancePoint> out;
    double start = 0.0;
    for (const auto& [v, flat] : vs) {
        if (out.empty() || v - start > tol_S) {
            out.push_back({v, grid.point(flat)});
            start = v;
        }
    }
    return out;
}

double variance_spacing(const ModelSpec& model, double t, double x, const ControlGrid& grid,
                        double s_lo, double s_hi) {
    std::vector<double> vs;
    CoefficientEval c;
    c.noise_dim = model.noise_dim;
    grid.for_each([&](std::size_t, const double* u) {
        model.evaluate(t, x, u, c);
        vs.push_back(c.variance);
    });
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end(),
                         [](double a, double b) { return b - a <= 1e-12 * std::max(1.0, std::abs(a)); }),
             vs.end());
    // include the neighbours just outside the range so its ends are covered
    auto lo = std::lower_bound(vs.begin(), vs.end(), s_lo);
    auto hi = std::upper_bound(vs.begin(), vs.end(), s_hi);
    if (lo != vs.begin()) --lo;
    if (hi != vs.end()) ++hi;
    double gap = 0.0;
    for (auto it = lo; it != hi && std::next(it) != hi; ++it) gap = std::max(gap, *std::next(it) - *it);
    return gap;
}

} // namespace vcontract
