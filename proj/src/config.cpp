#include "vcontract/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "catalogue.hpp"
#include "vcontract/error.hpp"

namespace vcontract {

using nlohmann::json;

namespace {

double num(const json& j, const std::string& key) {
    require(j.is_number(), "'" + key + "' must be a number");
    return j.get<double>();
}

std::vector<double> num_list(const json& j, const std::string& key) {
    require(j.is_array(), "'" + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(num(v, key));
    return out;
}

Interval interval(const json& j, const std::string& key) {
    require(j.is_array() && j.size() == 2, "'" + key + "' intervals are [lo, hi] pairs");
    return {num(j[0], key), num(j[1], key)};
}

std::vector<Interval> interval_list(const json& j, const std::string& key) {
    require(j.is_array() && !j.empty(), "'" + key + "' must be a non-empty list");
    if (j[0].is_number()) return {interval(j, key)};
    std::vector<Interval> out;
    for (const auto& v : j) out.push_back(interval(v, key));
    return out;
}

std::vector<std::size_t> grid_counts(const json& j) {
    require(j.is_array() && !j.empty(), "'grid' must be a list of per-axis counts");
    std::vector<std::size_t> out;
    for (const auto& v : j) {
        require(v.is_number_integer() && v.get<long long>() >= 1, "'grid' counts must be integers >= 1");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

Utility utility(const json& j, const std::string& key) {
    require(j.is_object(), "'" + key + "' must be an object");
    Utility u;
    const std::string type = j.value("type", "linear");
    if (type == "linear") {
        u.kind = UtilityKind::linear;
    } else if (type == "exponential") {
        u.kind = UtilityKind::exponential;
        require(j.contains("gamma"), "'" + key + "' exponential utility needs 'gamma'");
        u.risk_aversion = num(j["gamma"], key + ".gamma");
    } else {
        throw ValidationError("'" + key + "' type must be linear or exponential");
    }
    return u;
}

void reject_unknown(const json& doc, const std::set<std::string>& known) {
    for (const auto& [key, val] : doc.items()) {
        require(known.count(key) > 0, "unknown config key '" + key + "'");
    }
}

ModelSpec build_example(const json& doc) {
    const std::string name = doc["example"].get<std::string>();
    if (name == "scalar-vol") {
        reject_unknown(doc, {"example", "gamma_A", "gamma_P", "h", "T", "x0", "R_A", "u_min", "grid"});
        ScalarVolParams p;
        if (doc.contains("gamma_A")) p.gamma_a = num(doc["gamma_A"], "gamma_A");
        if (doc.contains("gamma_P")) p.gamma_p = num(doc["gamma_P"], "gamma_P");
        if (doc.contains("h")) p.h = num(doc["h"], "h");
        if (doc.contains("T")) p.horizon = num(doc["T"], "T");
        if (doc.contains("x0")) p.x0 = num(doc["x0"], "x0");
        if (doc.contains("R_A")) p.reservation = num(doc["R_A"], "R_A");
        if (doc.contains("u_min")) p.u_min = num(doc["u_min"], "u_min");
        require(p.horizon > 0.0, "horizon must be > 0");
        return make_scalar_vol(p);
    }
    if (name == "quartic") {
        reject_unknown(doc, {"example", "T", "x0", "R_A", "grid"});
        QuarticParams p;
        if (doc.contains("T")) p.horizon = num(doc["T"], "T");
        if (doc.contains("x0")) p.x0 = num(doc["x0"], "x0");
        if (doc.contains("R_A")) p.reservation = num(doc["R_A"], "R_A");
        require(p.horizon > 0.0, "horizon must be > 0");
        return make_quartic(p);
    }
    if (name == "demand-response") {
        reject_unknown(doc, {"example", "sigmas", "lambdas", "mus", "kappa", "theta", "h", "gamma_A",
                             "gamma_P", "T", "x0", "R_A", "a_max", "b_box", "grid"});
        DemandResponseParams p;
        if (doc.contains("sigmas")) p.sigmas = num_list(doc["sigmas"], "sigmas");
        if (doc.contains("lambdas")) p.lambdas = num_list(doc["lambdas"], "lambdas");
        if (doc.contains("mus")) p.mus = num_list(doc["mus"], "mus");
        if (doc.contains("kappa")) p.kappa = num(doc["kappa"], "kappa");
        if (doc.contains("theta")) p.theta = num(doc["theta"], "theta");
        if (doc.contains("h")) p.h = num(doc["h"], "h");
        if (doc.contains("gamma_A")) p.gamma_a = num(doc["gamma_A"], "gamma_A");
        if (doc.contains("gamma_P")) p.gamma_p = num(doc["gamma_P"], "gamma_P");
        if (doc.contains("T")) p.horizon = num(doc["T"], "T");
        if (doc.contains("x0")) p.x0 = num(doc["x0"], "x0");
        if (doc.contains("R_A")) p.reservation = num(doc["R_A"], "R_A");
        if (doc.contains("a_max")) p.a_max = num(doc["a_max"], "a_max");
        if (doc.contains("b_box")) p.b_box = interval_list(doc["b_box"], "b_box");
        require(p.horizon > 0.0, "horizon must be > 0");
        return make_demand_response(p);
    }
    throw ValidationError("unknown example '" + name + "'");
}

ModelSpec build_custom(const json& doc) {
    reject_unknown(doc, {"custom", "T", "x0", "R_A", "agent_utility", "principal_utility",
                         "principal_qv_weight", "grid", "name"});
    const json& c = doc["custom"];
    require(c.is_object(), "'custom' must be an object");
    reject_unknown(c, {"noise_dim", "controls", "drift", "vol", "cost", "agent_discount",
                       "principal_discount", "liquidation", "state_reward", "principal_running_cost"});
    require(c.contains("controls"), "custom model needs 'controls'");
    require(c.contains("vol"), "custom model needs 'vol'");
    require(c.contains("cost"), "custom model needs 'cost'");

    ModelSpec m;
    m.name = doc.value("name", "custom");
    m.control_box = interval_list(c["controls"], "controls");
    const int nu = static_cast<int>(m.control_box.size());
    catalogue::CustomSpec s;
    s.n_controls = nu;
    s.noise_dim = c.contains("noise_dim") ? static_cast<int>(num(c["noise_dim"], "noise_dim")) : 1;
    require(s.noise_dim >= 1 && s.noise_dim <= kMaxNoiseDim, "noise_dim must be in [1, 8]");
    require(c["vol"].is_array() && static_cast<int>(c["vol"].size()) == s.noise_dim,
            "'vol' needs one expression per noise dimension");
    for (int k = 0; k < s.noise_dim; ++k)
        s.vol.push_back(catalogue::Expr::parse(c["vol"][k], "vol", "txu", nu));
    auto get = [&](const char* key) -> json { return c.contains(key) ? c[key] : json(); };
    s.drift = catalogue::Expr::parse(get("drift"), "drift", "txu", nu);
    s.cost = catalogue::Expr::parse(get("cost"), "cost", "txu", nu);
    s.agent_discount = catalogue::Expr::parse(get("agent_discount"), "agent_discount", "txu", nu);
    s.principal_discount = catalogue::Expr::parse(get("principal_discount"), "principal_discount", "tx", nu);
    s.liquidation = c.contains("liquidation")
                        ? catalogue::Expr::parse(c["liquidation"], "liquidation", "x", nu)
                        : catalogue::Expr::parse(json::array({{{"c", 1.0}, {"x", 1.0}}}), "liquidation", "x", nu);
    s.state_reward = catalogue::Expr::parse(get("state_reward"), "state_reward", "tx", nu);
    s.principal_running_cost =
        catalogue::Expr::parse(get("principal_running_cost"), "principal_running_cost", "txS", nu);

    m.noise_dim = s.noise_dim;
    m.horizon = doc.contains("T") ? num(doc["T"], "T") : 1.0;
    m.x0 = doc.contains("x0") ? num(doc["x0"], "x0") : 0.0;
    if (doc.contains("agent_utility")) m.agent_utility = utility(doc["agent_utility"], "agent_utility");
    if (doc.contains("principal_utility"))
        m.principal_utility = utility(doc["principal_utility"], "principal_utility");
    m.reservation = doc.contains("R_A") ? num(doc["R_A"], "R_A") : (m.agent_utility.exponential() ? -1.0 : 0.0);
    if (doc.contains("principal_qv_weight"))
        m.principal_qv_weight = num(doc["principal_qv_weight"], "principal_qv_weight");
    m.traits = catalogue::traits_of(s);
    require(!(m.agent_utility.exponential() && !s.agent_discount.zero()),
            "agent discounting is not supported with exponential agent utility");
    m.coefficients = catalogue::make_coefficients(std::move(s));
    validate_model(m);
    return m;
}

} // namespace

ModelSpec build_model(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    require(doc.is_object(), "config must be a JSON object");
    const bool ex = doc.contains("example");
    const bool cu = doc.contains("custom");
    require(ex != cu, "config needs exactly one of 'example' or 'custom'");
    ModelSpec m;
    if (ex) {
        require(doc["example"].is_string(), "'example' must be a string");
        m = build_example(doc);
    } else {
        m = build_custom(doc);
    }
    if (doc.contains("grid")) {
        m.default_grid = grid_counts(doc["grid"]);
        require(m.default_grid.size() == m.control_dim(), "'grid' needs one count per control axis");
    }
    return m;
}

ModelSpec build_model_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return build_model(ss.str());
}

} // namespace vcontract
