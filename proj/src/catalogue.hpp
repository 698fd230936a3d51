#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "vcontract/model.hpp"

namespace vcontract::catalogue {

// Sum of monomials c * t^pt * x^px * S^pS * prod u_i^p_i.
struct Term {
    double coef = 0.0;
    double pt = 0.0, px = 0.0, ps = 0.0;
    std::vector<std::pair<int, double>> pu; // (control index, exponent)
};

class Expr {
public:
    Expr() = default;
    // allowed: subset of "t", "x", "u", "S"
    static Expr parse(const nlohmann::json& j, const std::string& what, const std::string& allowed,
                      int n_controls);

    double operator()(double t, double x, const double* u, double s = 0.0) const;
    bool uses_t() const;
    bool uses_x() const;
    bool uses_u() const;
    bool zero() const { return terms_.empty(); }
    bool affine_in_x() const;

private:
    std::vector<Term> terms_;
};

struct CustomSpec {
    int noise_dim = 1;
    int n_controls = 1;
    Expr drift, cost, agent_discount, principal_discount, liquidation, state_reward,
        principal_running_cost;
    std::vector<Expr> vol;
};

std::shared_ptr<const Coefficients> make_coefficients(CustomSpec spec);
ModelTraits traits_of(const CustomSpec& spec);

} // namespace vcontract::catalogue
