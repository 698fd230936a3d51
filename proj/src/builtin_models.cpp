#include <cmath>
#include <limits>

#include "vcontract/config.hpp"
#include "vcontract/error.hpp"

namespace vcontract {

namespace {

ModelTraits state_free_traits() {
    ModelTraits t;
    t.time_dependent = false;
    t.state_dependent = false;
    t.discount_depends_on_control = false;
    t.zero_discounts = true;
    t.affine_state_terms = true;
    return t;
}

class ScalarVolCoefficients final : public Coefficients {
public:
    void evaluate(double, double, const double* u, CoefficientEval& out) const override {
        const double v = u[0] * u[0];
        out.drift = 0.0;
        out.diffusion[0] = u[0];
        out.noise_dim = 1;
        out.variance = v;
        out.cost = 0.5 / v;
        out.k_a = 0.0;
    }
    double liquidation(double x) const override { return x; }
};

class QuarticCoefficients final : public Coefficients {
public:
    void evaluate(double, double, const double* u, CoefficientEval& out) const override {
        const double v = u[0] * u[0];
        out.drift = 0.0;
        out.diffusion[0] = u[0];
        out.noise_dim = 1;
        out.variance = v;
        out.cost = 1.0 - v * v;
        out.k_a = 0.0;
    }
    double liquidation(double x) const override { return x; }
    double principal_running_cost(double, double, double s) const override { return s * s * s; }
};

// u = (a_1..a_d, b_1..b_d)
class DemandResponseCoefficients final : public Coefficients {
public:
    explicit DemandResponseCoefficients(const DemandResponseParams& p)
        : d_(static_cast<int>(p.sigmas.size())), kappa_(p.kappa), theta_(p.theta) {
        for (int k = 0; k < d_; ++k) {
            sigma_[k] = p.sigmas[k];
            sig2_[k] = p.sigmas[k] * p.sigmas[k];
            inv_mu_[k] = 1.0 / p.mus[k];
            sig2_over_lambda_[k] = sig2_[k] / p.lambdas[k];
        }
    }

    void evaluate(double, double, const double* u, CoefficientEval& out) const override {
        double drift = 0.0, var = 0.0, c1 = 0.0, c2 = 0.0;
        for (int k = 0; k < d_; ++k) {
            const double a = u[k];
            const double b = u[d_ + k];
            drift -= a;
            out.diffusion[k] = sigma_[k] * std::sqrt(b);
            var += sig2_[k] * b;
            c1 += a * a * inv_mu_[k];
            c2 += b > 0.0 ? sig2_over_lambda_[k] / b : std::numeric_limits<double>::infinity();
        }
        out.noise_dim = d_;
        out.drift = drift;
        out.variance = var;
        out.cost = 0.5 * c1 + 0.5 * c2;
        out.k_a = 0.0;
    }
    double liquidation(double) const override { return 0.0; }
    double state_reward(double, double x) const override { return kappa_ * x; }
    double principal_running_cost(double, double x, double) const override { return theta_ * x; }

private:
    int d_;
    double kappa_, theta_;
    double sigma_[kMaxNoiseDim]{}, sig2_[kMaxNoiseDim]{}, inv_mu_[kMaxNoiseDim]{},
        sig2_over_lambda_[kMaxNoiseDim]{};
};

void positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, std::string(name) + " must be > 0");
}

} // namespace

ModelSpec make_scalar_vol(const ScalarVolParams& p) {
    positive(p.gamma_a, "gamma_A");
    positive(p.gamma_p, "gamma_P");
    require(std::isfinite(p.h) && p.h >= 0.0, "h must be >= 0");
    require(p.u_min > 0.0 && p.u_min < 1.0, "u_min must be in (0, 1)");
    ModelSpec m;
    m.name = "scalar-vol";
    m.horizon = p.horizon;
    m.x0 = p.x0;
    m.noise_dim = 1;
    m.control_box = {{p.u_min, 1.0}};
    m.reservation = p.reservation;
    m.agent_utility = {UtilityKind::exponential, p.gamma_a};
    m.principal_utility = {UtilityKind::exponential, p.gamma_p};
    m.principal_qv_weight = p.h;
    m.coefficients = std::make_shared<ScalarVolCoefficients>();
    m.traits = state_free_traits();
    m.default_grid = {20001};
    m.parameters = {{"gamma_A", p.gamma_a}, {"gamma_P", p.gamma_p}, {"h", p.h}, {"u_min", p.u_min}};
    validate_model(m);
    return m;
}

ModelSpec make_quartic(const QuarticParams& p) {
    ModelSpec m;
    m.name = "quartic";
    m.horizon = p.horizon;
    m.x0 = p.x0;
    m.noise_dim = 1;
    m.control_box = {{-1.0, 1.0}};
    m.reservation = p.reservation;
    m.coefficients = std::make_shared<QuarticCoefficients>();
    m.traits = state_free_traits();
    m.default_grid = {20001};
    validate_model(m);
    return m;
}

ModelSpec make_demand_response(const DemandResponseParams& p) {
    const std::size_t d = p.sigmas.size();
    require(d >= 1 && d <= std::size_t(kMaxNoiseDim), "demand-response needs 1..8 components");
    require(p.lambdas.size() == d && p.mus.size() == d, "sigmas, lambdas and mus need equal length");
    for (std::size_t k = 0; k < d; ++k) {
        positive(p.sigmas[k], "sigma_k");
        positive(p.lambdas[k], "lambda_k");
        positive(p.mus[k], "mu_k");
    }
    positive(p.gamma_a, "gamma_A");
    positive(p.gamma_p, "gamma_P");
    positive(p.a_max, "a_max");
    require(std::isfinite(p.kappa) && std::isfinite(p.theta), "kappa and theta must be finite");
    require(std::isfinite(p.h) && p.h >= 0.0, "h must be >= 0");
    require(p.b_box.size() == 1 || p.b_box.size() == d, "b_box needs one interval or one per component");
    ModelSpec m;
    m.name = "demand-response";
    m.horizon = p.horizon;
    m.x0 = p.x0;
    m.noise_dim = static_cast<int>(d);
    for (std::size_t k = 0; k < d; ++k) m.control_box.push_back({0.0, p.mus[k] * p.a_max});
    for (std::size_t k = 0; k < d; ++k) {
        const Interval b = p.b_box.size() == 1 ? p.b_box[0] : p.b_box[k];
        require(b.lo >= 0.0 && b.hi > 0.0, "b_box must lie in [0, inf) and be non-trivial");
        m.control_box.push_back(b);
    }
    m.reservation = p.reservation;
    m.agent_utility = {UtilityKind::exponential, p.gamma_a};
    m.principal_utility = {UtilityKind::exponential, p.gamma_p};
    m.principal_qv_weight = 0.5 * p.h;
    m.coefficients = std::make_shared<DemandResponseCoefficients>(p);
    m.traits = state_free_traits();
    m.default_grid.assign(d, 5);
    m.default_grid.resize(2 * d, 401);
    m.parameters = {{"kappa", p.kappa}, {"theta", p.theta}, {"h", p.h},
                    {"gamma_A", p.gamma_a}, {"gamma_P", p.gamma_p}, {"a_max", p.a_max}};
    for (std::size_t k = 0; k < d; ++k) {
        const std::string s = std::to_string(k + 1);
        m.parameters["sigma_" + s] = p.sigmas[k];
        m.parameters["lambda_" + s] = p.lambdas[k];
        m.parameters["mu_" + s] = p.mus[k];
    }
    validate_model(m);
    return m;
}

} // namespace vcontract
