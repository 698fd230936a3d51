#include "catalogue.hpp"

#include <cmath>

#include "vcontract/error.hpp"

namespace vcontract::catalogue {

namespace {

double ipow(double b, int e) {
    if (e < 0) return 1.0 / ipow(b, -e);
    double r = 1.0;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

double power(double b, double e) {
    if (e == 0.0) return 1.0;
    if (e == 1.0) return b;
    const double r = std::nearbyint(e);
    if (r == e && std::abs(e) <= 64) return ipow(b, static_cast<int>(r));
    if (e == 0.5) return std::sqrt(b);
    if (e == -0.5) return 1.0 / std::sqrt(b);
    return std::pow(b, e);
}

double exponent_of(const nlohmann::json& v, const std::string& what) {
    require(v.is_number(), what + ": exponents must be numbers");
    const double e = v.get<double>();
    require(std::isfinite(e), what + ": exponents must be finite");
    return e;
}

} // namespace

Expr Expr::parse(const nlohmann::json& j, const std::string& what, const std::string& allowed,
                 int n_controls) {
    Expr e;
    if (j.is_null()) return e;
    if (j.is_number()) {
        if (j.get<double>() != 0.0) e.terms_.push_back({j.get<double>(), 0, 0, 0, {}});
        return e;
    }
    require(j.is_array(), what + ": expected a number or a list of terms");
    for (const auto& tj : j) {
        require(tj.is_object(), what + ": each term is an object");
        Term t;
        t.coef = 1.0;
        for (const auto& [key, val] : tj.items()) {
            if (key == "c") {
                require(val.is_number(), what + ": c must be a number");
                t.coef = val.get<double>();
            } else if (key == "t" || key == "x" || key == "S") {
                require(allowed.find(key[0]) != std::string::npos, what + ": variable " + key + " not allowed");
                double& slot = key == "t" ? t.pt : key == "x" ? t.px : t.ps;
                slot = exponent_of(val, what);
            } else if (key.size() > 1 && key[0] == 'u') {
                require(allowed.find('u') != std::string::npos, what + ": controls not allowed");
                int idx = -1;
                try {
                    std::size_t pos = 0;
                    idx = std::stoi(key.substr(1), &pos);
                    if (pos != key.size() - 1) idx = -1;
                } catch (...) {
                    idx = -1;
                }
                require(idx >= 0 && idx < n_controls, what + ": unknown control " + key);
                t.pu.emplace_back(idx, exponent_of(val, what));
            } else {
                throw ValidationError(what + ": unknown term key '" + key + "'");
            }
        }
        require(std::isfinite(t.coef), what + ": coefficient must be finite");
        if (t.coef != 0.0) e.terms_.push_back(std::move(t));
    }
    return e;
}

double Expr::operator()(double t, double x, const double* u, double s) const {
    double sum = 0.0;
    for (const auto& term : terms_) {
        double v = term.coef;
        if (term.pt != 0.0) v *= power(t, term.pt);
        if (term.px != 0.0) v *= power(x, term.px);
        if (term.ps != 0.0) v *= power(s, term.ps);
        for (const auto& [i, p] : term.pu) v *= power(u[i], p);
        sum += v;
    }
    return sum;
}

bool Expr::uses_t() const {
    for (const auto& t : terms_) if (t.pt != 0.0) return true;
    return false;
}
bool Expr::uses_x() const {
    for (const auto& t : terms_) if (t.px != 0.0) return true;
    return false;
}
bool Expr::uses_u() const {
    for (const auto& t : terms_)
        for (const auto& [i, p] : t.pu) if (p != 0.0) return true;
    return false;
}
bool Expr::affine_in_x() const {
    for (const auto& t : terms_) {
        if (t.pt != 0.0) return false;
        if (t.px != 0.0 && t.px != 1.0) return false;
        if (t.px == 1.0 && t.ps != 0.0) return false;
    }
    return true;
}

namespace {

class CatalogueCoefficients final : public Coefficients {
public:
    explicit CatalogueCoefficients(CustomSpec s) : s_(std::move(s)) {}

    void evaluate(double t, double x, const double* u, CoefficientEval& out) const override {
        out.noise_dim = s_.noise_dim;
        out.drift = s_.drift(t, x, u);
        double v = 0.0;
        for (int k = 0; k < s_.noise_dim; ++k) {
            const double r = s_.vol[k](t, x, u);
            out.diffusion[k] = r;
            v += r * r;
        }
        out.variance = v;
        out.cost = s_.cost(t, x, u);
        out.k_a = s_.agent_discount(t, x, u);
    }
    double principal_discount(double t, double x) const override {
        return s_.principal_discount(t, x, nullptr);
    }
    double liquidation(double x) const override { return s_.liquidation(0.0, x, nullptr); }
    double state_reward(double t, double x) const override { return s_.state_reward(t, x, nullptr); }
    double principal_running_cost(double t, double x, double s) const override {
        return s_.principal_running_cost(t, x, nullptr, s);
    }

private:
    CustomSpec s_;
};

} // namespace

std::shared_ptr<const Coefficients> make_coefficients(CustomSpec spec) {
    return std::make_shared<CatalogueCoefficients>(std::move(spec));
}

ModelTraits traits_of(const CustomSpec& s) {
    ModelTraits tr;
    bool t = s.drift.uses_t() || s.cost.uses_t() || s.agent_discount.uses_t();
    bool x = s.drift.uses_x() || s.cost.uses_x() || s.agent_discount.uses_x();
    for (const auto& v : s.vol) {
        t = t || v.uses_t();
        x = x || v.uses_x();
    }
    tr.time_dependent = t;
    tr.state_dependent = x;
    tr.discount_depends_on_control = s.agent_discount.uses_u();
    tr.zero_discounts = s.agent_discount.zero() && s.principal_discount.zero();
    tr.affine_state_terms = s.state_reward.affine_in_x() && s.principal_running_cost.affine_in_x() &&
                            s.principal_discount.zero();
    return tr;
}

} // namespace vcontract::catalogue
