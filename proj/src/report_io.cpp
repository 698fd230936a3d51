#include "vcontract/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vcontract/error.hpp"

namespace vcontract {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    if (std::string(buf) == "-0") return "0";
    return buf;
}

json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    const double r = std::strtod(format_number(v).c_str(), nullptr);
    return r == 0.0 ? 0.0 : r;
}

namespace {

json numbers(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(json_number(x));
    return a;
}

const char* utility_name(const Utility& u) {
    return u.exponential() ? "exponential" : "linear";
}

} // namespace

json to_json(const ModelSpec& m) {
    json j;
    j["name"] = m.name;
    j["T"] = json_number(m.horizon);
    j["x0"] = json_number(m.x0);
    j["noise_dim"] = m.noise_dim;
    json box = json::array();
    for (const auto& iv : m.control_box) box.push_back({json_number(iv.lo), json_number(iv.hi)});
    j["control_box"] = box;
    j["grid"] = m.default_grid;
    j["R_A"] = json_number(m.reservation);
    j["agent_utility"] = {{"type", utility_name(m.agent_utility)},
                          {"gamma", json_number(m.agent_utility.risk_aversion)}};
    j["principal_utility"] = {{"type", utility_name(m.principal_utility)},
                              {"gamma", json_number(m.principal_utility.risk_aversion)}};
    j["principal_qv_weight"] = json_number(m.principal_qv_weight);
    json params = json::object();
    for (const auto& [k, v] : m.parameters) params[k] = json_number(v);
    j["parameters"] = params;
    return j;
}

json to_json(const HamiltonianEval& h) {
    return {{"value", json_number(h.value)},
            {"argmax", numbers(h.argmax)},
            {"variance", json_number(h.variance)},
            {"constraint_residual", json_number(h.constraint_residual)},
            {"feasible", h.feasible}};
}

json to_json(const MCEstimate& e) {
    return {{"mean", json_number(e.mean)}, {"std_error", json_number(e.std_error)}, {"n", e.n}};
}

json to_json(const DualityReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"S", json_number(row.S)},
                        {"H_constrained", json_number(row.h_constrained)},
                        {"biconjugate", json_number(row.biconjugate)},
                        {"gap", json_number(row.gap)},
                        {"gamma_star", json_number(row.gamma_star)},
                        {"gamma_clamped", row.clamped}});
    }
    return {{"holds", r.holds},
            {"max_gap", json_number(r.max_gap)},
            {"witness_S", json_number(r.witness_S)},
            {"min_gap", json_number(r.min_gap)},
            {"eps_grid", json_number(r.eps_grid)},
            {"tol_gap", json_number(r.tol_gap)},
            {"tol_S", json_number(r.tol_S)},
            {"n_clamped", r.n_clamped},
            {"skipped_S", numbers(r.skipped_S)},
            {"rows", rows}};
}

json to_json(const BestResponseReport& r) {
    json devs = json::array();
    for (const auto& d : r.deviation_values) {
        devs.push_back({{"description", d.deviation.description},
                        {"control", numbers(d.deviation.control)},
                        {"form", d.deviation.use_cpt ? "cpt" : "fb"},
                        {"gamma", json_number(d.deviation.gamma)},
                        {"value", to_json(d.value)},
                        {"pooled_std_error", json_number(d.pooled_std_error)},
                        {"ok", d.ok}});
    }
    return {{"on_policy_value", to_json(r.on_policy_value)},
            {"y0", json_number(r.y0)},
            {"allowance", json_number(r.allowance)},
            {"value_matches_y0", r.value_matches_y0},
            {"deviations", devs},
            {"pass", r.pass}};
}

json to_json(const EquivalenceReport& r) {
    auto opt = [](const ScanOptimum& o, const char* param) {
        return json{{"z", json_number(o.z)}, {param, json_number(o.param)}, {"value", to_json(o.value)}};
    };
    return {{"best_cpt", opt(r.best_cpt, "gamma")},
            {"best_fb", opt(r.best_fb, "S")},
            {"value_gap", json_number(r.value_gap)},
            {"pooled_std_error", json_number(r.pooled_std_error)},
            {"sigma_of_best_gamma", json_number(r.sigma_of_best_gamma)},
            {"corresponding", r.corresponding},
            {"constant_policy_fast_path", r.used_fast_path}};
}

json to_json(const ExampleSolution& s) {
    json q = json::object();
    for (const auto& v : s.quantities) {
        q[v.name] = {{"closed_form", json_number(v.closed_form)},
                     {"solver", json_number(v.solver)},
                     {"abs_error", json_number(v.abs_error)},
                     {"formula", v.formula}};
    }
    json extras = json::object();
    for (const auto& [k, v] : s.extras) extras[k] = json_number(v);
    json j = {{"example", s.example_id},
              {"quantities", q},
              {"agent_value", json_number(s.agent_value)},
              {"principal_value", json_number(s.principal_value)},
              {"extras", extras}};
    // solver values also at top level
    for (const auto& v : s.quantities) j[v.name] = json_number(v.solver);
    return j;
}

json summary_json(const ModelSpec& model, const PathEnsemble& ens) {
    const std::size_t n_steps = ens.time.empty() ? 0 : ens.time.size() - 1;
    return {{"form", ens.form == ContractForm::cpt ? "cpt" : "fb"},
            {"qv_source", ens.qv_source == QvSource::realized ? "realized" : "model"},
            {"n_paths", ens.terminal.size()},
            {"n_steps", n_steps},
            {"dt", json_number(ens.dt)},
            {"n_infeasible", ens.n_infeasible},
            {"agent_objective", to_json(agent_objective(model, ens))},
            {"principal_objective", to_json(principal_objective(model, ens))}};
}

std::string duality_csv(const DualityReport& r) {
    std::ostringstream os;
    os << "S,H_constrained,biconjugate,gap,gamma_star\n";
    for (const auto& row : r.rows) {
        os << format_number(row.S) << ',' << format_number(row.h_constrained) << ','
           << format_number(row.biconjugate) << ',' << format_number(row.gap) << ','
           << format_number(row.gamma_star) << '\n';
    }
    return os.str();
}

std::string traces_csv(const PathEnsemble& ens) {
    std::ostringstream os;
    os << "path,t,X,Y,QV,cost,K_A\n";
    for (std::size_t p = 0; p < ens.traces.size(); ++p) {
        const auto& tr = ens.traces[p];
        for (std::size_t k = 0; k < tr.x.size(); ++k) {
            os << p << ',' << format_number(ens.time[k]) << ',' << format_number(tr.x[k]) << ','
               << format_number(tr.y[k]) << ',' << format_number(tr.qv[k]) << ','
               << format_number(tr.cost[k]) << ',' << format_number(tr.k_a[k]) << '\n';
        }
    }
    return os.str();
}

std::string surface_csv(const std::vector<ScanCell>& cells, const std::string& param_name) {
    std::ostringstream os;
    os << "z," << param_name << ",mean,std_error,feasible\n";
    for (const auto& c : cells) {
        os << format_number(c.z) << ',' << format_number(c.param) << ','
           << (c.feasible ? format_number(c.value.mean) : "nan") << ','
           << (c.feasible ? format_number(c.value.std_error) : "nan") << ',' << (c.feasible ? 1 : 0)
           << '\n';
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

} // namespace vcontract
