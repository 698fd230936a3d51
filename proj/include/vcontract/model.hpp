#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vcontract {

inline constexpr int kMaxNoiseDim = 8;
inline constexpr double kBoxSlack = 1e-12;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class UtilityKind { linear, exponential };

struct Utility {
    UtilityKind kind = UtilityKind::linear;
    double risk_aversion = 0.0;

    double operator()(double w) const;
    double inverse(double v) const;
    bool exponential() const { return kind == UtilityKind::exponential; }
};

// Pointwise coefficients. drift is the sigma*lambda product (d = 1).
struct CoefficientEval {
    double drift = 0.0;
    std::array<double, kMaxNoiseDim> diffusion{};
    int noise_dim = 1;
    double variance = 0.0;
    double cost = 0.0;
    double k_a = 0.0;

    std::span<const double> diffusion_row() const {
        return {diffusion.data(), static_cast<std::size_t>(noise_dim)};
    }
};

// Which arguments the control-relevant coefficients actually use.
struct ModelTraits {
    bool time_dependent = true;
    bool state_dependent = true;
    bool discount_depends_on_control = true;
    bool zero_discounts = false;
    // state reward, principal running cost and principal discount are
    // time-free and affine in x
    bool affine_state_terms = false;
};

class Coefficients {
public:
    virtual ~Coefficients() = default;

    // Fills drift, diffusion, variance, cost and k_a. No box check.
    virtual void evaluate(double t, double x, const double* u, CoefficientEval& out) const = 0;

    virtual double principal_discount(double /*t*/, double /*x*/) const { return 0.0; }
    virtual double liquidation(double x) const = 0;
    // Agent running reward depending on the state only (kappa*x in the demand-response model).
    virtual double state_reward(double /*t*/, double /*x*/) const { return 0.0; }
    // c_P(t, x, S): running cost of the principal, S is the model variance.
    virtual double principal_running_cost(double /*t*/, double /*x*/, double /*s*/) const { return 0.0; }
};

struct ModelSpec {
    std::string name;
    double horizon = 1.0;
    double x0 = 0.0;
    int output_dim = 1;
    int noise_dim = 1;
    std::vector<Interval> control_box;
    double reservation = 0.0;
    Utility agent_utility;
    Utility principal_utility;
    // weight on the terminal quadratic variation in the principal payoff
    double principal_qv_weight = 0.0;
    std::shared_ptr<const Coefficients> coefficients;
    ModelTraits traits;
    // default per-axis lattice counts for this model
    std::vector<std::size_t> default_grid;
    std::map<std::string, double> parameters;

    std::size_t control_dim() const { return control_box.size(); }
    bool in_box(std::span<const double> u, double slack = kBoxSlack) const;

    // Unchecked evaluation for inner loops.
    void evaluate(double t, double x, const double* u, CoefficientEval& out) const {
        coefficients->evaluate(t, x, u, out);
    }
};

using ModelPtr = std::shared_ptr<const ModelSpec>;

// Validates structure and spot-checks boundedness and cost sign on the grid.
void validate_model(const ModelSpec& model);

CoefficientEval eval_coefficients(const ModelSpec& model, double t, double x,
                                  std::span<const double> u);

class ControlGrid {
public:
    ControlGrid() = default;
    ControlGrid(const std::vector<Interval>& box, const std::vector<std::size_t>& counts);

    static ControlGrid for_model(const ModelSpec& model);
    static ControlGrid for_model(const ModelSpec& model, const std::vector<std::size_t>& counts);

    std::size_t size() const { return size_; }
    std::size_t dim() const { return axes_.size(); }
    const std::vector<double>& axis(std::size_t a) const { return axes_[a]; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    const std::vector<Interval>& box() const { return box_; }
    // spacing along an axis, 0 for singleton axes
    double step(std::size_t a) const;

    void point(std::size_t flat, double* u) const;
    std::vector<double> point(std::size_t flat) const;

    // Every other point on each axis, ends kept.
    ControlGrid coarsened() const;

    // Calls f(flat_index, const double* u) in lexicographic order, axis 0 outermost.
    template <class F>
    void for_each(F&& f) const { for_range(0, size_, f); }

    template <class F>
    void for_range(std::size_t begin, std::size_t end, F&& f) const {
        const std::size_t d = axes_.size();
        if (begin >= end) return;
        std::array<std::size_t, 16> idx{};
        std::array<double, 16> u{};
        std::size_t rem = begin;
        for (std::size_t a = d; a-- > 0;) {
            idx[a] = rem % counts_[a];
            rem /= counts_[a];
            u[a] = axes_[a][idx[a]];
        }
        for (std::size_t flat = begin; flat < end; ++flat) {
            f(flat, static_cast<const double*>(u.data()));
            for (std::size_t a = d; a-- > 0;) {
                if (++idx[a] < counts_[a]) {
                    u[a] = axes_[a][idx[a]];
                    break;
                }
                idx[a] = 0;
                u[a] = axes_[a][0];
            }
        }
    }

private:
    std::vector<Interval> box_;
    std::vector<std::size_t> counts_;
    std::vector<std::vector<double>> axes_;
    std::size_t size_ = 0;
};

struct VariancePoint {
    double variance = 0.0;
    std::vector<double> witness;
};

std::vector<VariancePoint> achievable_variance_set(const ModelSpec& model, double t, double x,
                                                   const ControlGrid& grid, double tol_S = 1e-12);

// Largest gap between consecutive distinct lattice variances inside [s_lo, s_hi].
double variance_spacing(const ModelSpec& model, double t, double x, const ControlGrid& grid,
                        double s_lo, double s_hi);

} // namespace vcontract
