// Command-line front end. Talks to the library only through the C interface.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcontract/vcontract.h"

using nlohmann::json;

namespace {

struct Failure {
    int exit_code;
    std::string message;
};

int exit_code_for(vc_status s) {
    switch (s) {
    case VC_OK: return 0;
    case VC_ERR_VALIDATION: return 1;
    default: return 2;
    }
}

void check(vc_status s) {
    if (s != VC_OK) throw Failure{exit_code_for(s), vc_last_error()};
}

// owned char* from the library
std::string take(char* p) {
    std::string s = p ? p : "";
    vc_string_free(p);
    return s;
}

struct Model {
    vc_model* m = nullptr;
    explicit Model(const std::string& path) {
        if (path.empty()) throw Failure{1, "--config is required"};
        check(vc_model_from_file(path.c_str(), &m));
    }
    ~Model() { vc_model_free(m); }
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;
};

double model_x0(const Model& m) {
    char* s = nullptr;
    check(vc_model_describe(m.m, &s));
    return json::parse(take(s)).value("x0", 0.0);
}

struct Grid {
    vc_grid* g = nullptr;
    Grid(const Model& model, const std::vector<std::size_t>& counts) {
        if (counts.empty()) check(vc_grid_default(model.m, &g));
        else check(vc_grid_create(model.m, counts.data(), counts.size(), &g));
    }
    ~Grid() { vc_grid_free(g); }
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;
};

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round12(v);
}

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) throw Failure{1, "grid sizes must be >= 1"};
    if (n == 1) return {lo};
    if (!(lo < hi)) throw Failure{1, "grid bounds need lo < hi"};
    std::vector<double> v(n);
    const double step = (hi - lo) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + double(i) * step;
    v[n - 1] = hi;
    return v;
}

struct Out {
    std::string dir = ".";
    void prepare() const {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw Failure{1, "cannot create output directory '" + dir + "': " + ec.message()};
    }
    std::string path(const std::string& name) const { return (std::filesystem::path(dir) / name).string(); }
    void write(const std::string& name, const std::string& text) const {
        check(vc_write_file(path(name).c_str(), text.c_str()));
        std::cout << "wrote " << path(name) << "\n";
    }
};

struct SimFlags {
    std::size_t paths = 1000;
    std::size_t steps = 1000;
    std::uint64_t seed = 42;
    unsigned workers = 0;
    std::size_t qv_window = 100;
    std::size_t trace_paths = 8;
    bool model_qv = false;

    void add(CLI::App* app) {
        app->add_option("--paths", paths, "Monte Carlo paths");
        app->add_option("--steps", steps, "time steps");
        app->add_option("--seed", seed, "master seed");
        app->add_option("--workers", workers, "worker threads, 0 = all cores");
        app->add_option("--qv-window", qv_window, "rolling window for realized QV");
        app->add_option("--trace-paths", trace_paths, "paths kept in full");
        app->add_flag("--model-qv", model_qv, "use sigma^2 dt instead of squared increments for d<X>");
    }
    vc_sim_config config() const {
        vc_sim_config c;
        vc_sim_config_default(&c);
        c.n_paths = paths;
        c.n_steps = steps;
        c.seed = seed;
        c.workers = workers;
        c.qv_window = qv_window;
        c.trace_paths = trace_paths;
        c.model_qv = model_qv ? 1 : 0;
        return c;
    }
};

struct Base {
    std::string config;
    Out out;
    std::vector<std::size_t> grid;
    void add(CLI::App* app, bool needs_config = true) {
        auto* c = app->add_option("--config", config, "model config (JSON)");
        if (needs_config) c->check(CLI::ExistingFile);
        app->add_option("--out", out.dir, "output directory");
        app->add_option("--grid", grid, "control lattice points per axis (model default if omitted)");
    }
};

// ---- hamiltonian ----------------------------------------------------------

struct HamiltonianCmd {
    Base base;
    double t = 0, x = 0, y = 0, z = 0;
    std::vector<double> gammas;
    std::vector<double> s_values;
    double tol_s = 0.0;

    void add(CLI::App* app) {
        base.add(app);
        app->add_option("--t", t, "time");
        app->add_option("--x", x, "state; model x0 when omitted");
        app->add_option("--y", y, "continuation value");
        app->add_option("--z", z, "loading on dX");
        app->add_option("--gamma", gammas, "values of Gamma for the unconstrained supremum");
        app->add_option("--S", s_values, "target variances for the constrained supremum");
        app->add_option("--tol-s", tol_s, "variance band, <= 0 selects the default");
    }

    int run(CLI::App* app) {
        Model m(base.config);
        Grid g(m, base.grid);
        if (!app->count("--x")) x = model_x0(m);
        if (gammas.empty() && s_values.empty()) gammas = {0.0};
        const vc_state p{t, x, y, z};
        json doc;
        doc["state"] = {{"t", num(t)}, {"x", num(x)}, {"y", num(y)}, {"z", num(z)}};
        doc["full"] = json::array();
        doc["constrained"] = json::array();
        std::string csv = "kind,param,value,variance,feasible,argmax\n";
        auto argmax_json = [](const vc_hamiltonian& h) {
            json a = json::array();
            for (std::size_t i = 0; i < h.control_dim; ++i) a.push_back(num(h.argmax[i]));
            return a;
        };
        auto argmax_csv = [](const vc_hamiltonian& h) {
            std::string s;
            for (std::size_t i = 0; i < h.control_dim; ++i) s += (i ? ";" : "") + fmt12(h.argmax[i]);
            return s;
        };
        std::cout << "kind         param        value        variance     argmax\n";
        for (double gm : gammas) {
            vc_hamiltonian h;
            check(vc_hamiltonian_full(m.m, g.g, p, gm, &h));
            doc["full"].push_back({{"gamma", num(gm)}, {"value", num(h.value)}, {"variance", num(h.variance)},
                                   {"argmax", argmax_json(h)}});
            csv += "full," + fmt12(gm) + "," + fmt12(h.value) + "," + fmt12(h.variance) + ",1," + argmax_csv(h) + "\n";
            std::printf("full         %-12.6g %-12.6g %-12.6g %s\n", gm, h.value, h.variance, argmax_csv(h).c_str());
        }
        for (double S : s_values) {
            vc_hamiltonian h;
            check(vc_hamiltonian_constrained(m.m, g.g, p, S, tol_s, &h));
            doc["constrained"].push_back({{"S", num(S)},
                                          {"value", num(h.value)},
                                          {"variance", num(h.variance)},
                                          {"feasible", h.feasible != 0},
                                          {"constraint_residual", num(h.constraint_residual)},
                                          {"argmax", argmax_json(h)}});
            csv += "constrained," + fmt12(S) + "," + fmt12(h.value) + "," + fmt12(h.variance) + "," +
                   (h.feasible ? "1" : "0") + "," + argmax_csv(h) + "\n";
            if (h.feasible)
                std::printf("constrained  %-12.6g %-12.6g %-12.6g %s\n", S, h.value, h.variance, argmax_csv(h).c_str());
            else
                std::printf("constrained  %-12.6g infeasible\n", S);
        }
        base.out.prepare();
        base.out.write("hamiltonian.json", doc.dump(2) + "\n");
        base.out.write("hamiltonian.csv", csv);
        return 0;
    }
};

// ---- duality --------------------------------------------------------------

struct DualityCmd {
    Base base;
    double z = 0.0;
    std::size_t s_steps = 101;
    std::optional<double> s_min, s_max;
    std::size_t gamma_steps = 60001;
    double gamma_min = -50.0, gamma_max = 10.0;
    double tol_gap = 0.0, tol_s = 0.0;

    void add(CLI::App* app) {
        base.add(app);
        app->add_option("--z", z, "loading on dX");
        app->add_option("--s-steps", s_steps, "points of the S grid");
        app->add_option("--s-min", s_min, "smallest S (default: smallest lattice variance)");
        app->add_option("--s-max", s_max, "largest S (default: largest lattice variance)");
        app->add_option("--gamma-steps", gamma_steps, "points of the Gamma grid");
        app->add_option("--gamma-min", gamma_min, "Gamma grid lower end");
        app->add_option("--gamma-max", gamma_max, "Gamma grid upper end");
        app->add_option("--tol-gap", tol_gap, "gap tolerance, <= 0 uses 5 * eps_grid");
        app->add_option("--tol-s", tol_s, "variance band, <= 0 selects the default");
    }

    int run() {
        Model m(base.config);
        Grid g(m, base.grid);
        const double x0 = model_x0(m);
        double lo = 0, hi = 0;
        check(vc_variance_range(m.m, g.g, 0.0, x0, &lo, &hi));
        const auto s = linspace(s_min.value_or(lo), s_max.value_or(hi), s_steps);
        vc_duality_options o{{gamma_min, gamma_max, gamma_steps}, tol_s, tol_gap};
        char *js = nullptr, *csv = nullptr;
        check(vc_duality_report(m.m, g.g, {0.0, x0, 0.0, z}, s.data(), s.size(), &o, &js, &csv));
        const std::string jtext = take(js), ctext = take(csv);
        const json r = json::parse(jtext);
        std::cout << "holds      " << (r["holds"].get<bool>() ? "true" : "false") << "\n"
                  << "max_gap    " << r["max_gap"] << " at S = " << r["witness_S"] << "\n"
                  << "tol_gap    " << r["tol_gap"] << " (eps_grid " << r["eps_grid"] << ")\n"
                  << "rows       " << r["rows"].size() << ", clamped " << r["n_clamped"] << "\n";
        base.out.prepare();
        base.out.write("duality_report.csv", ctext);
        base.out.write("duality_report.json", jtext + "\n");
        return 0;
    }
};

// ---- simulate -------------------------------------------------------------

struct SimulateCmd {
    Base base;
    SimFlags sim;
    std::string form = "cpt";
    std::optional<double> y0;
    double z = 0.0, gamma = 0.0, sigma = 1.0, tol_s = 0.0;
    std::vector<double> effort;

    void add(CLI::App* app) {
        base.add(app);
        sim.add(app);
        app->add_option("--form", form, "contract form: cpt (Gamma loading) or fb (target variance)")
            ->check(CLI::IsMember({"cpt", "fb"}));
        app->add_option("--y0", y0, "initial value (default: R_A)");
        app->add_option("--z", z, "loading on dX");
        app->add_option("--gamma", gamma, "loading on d<X> (cpt)");
        app->add_option("--sigma", sigma, "quadratic-variation density (fb)");
        app->add_option("--effort", effort, "fixed control instead of the maximiser");
        app->add_option("--tol-s", tol_s, "variance band, <= 0 selects the default");
    }

    int run() {
        Model m(base.config);
        Grid g(m, base.grid);
        const vc_sim_config cfg = sim.config();
        if (!effort.empty() && effort.size() != vc_model_control_dim(m.m))
            throw Failure{1, "--effort needs one value per control"};
        vc_contract c{form == "fb" ? VC_FORM_FB : VC_FORM_CPT, y0.value_or(vc_model_reservation(m.m)), z, gamma,
                      sigma};
        vc_ensemble* e = nullptr;
        check(vc_simulate(m.m, g.g, &c, &cfg, tol_s, effort.empty() ? nullptr : effort.data(), &e));
        std::unique_ptr<vc_ensemble, void (*)(vc_ensemble*)> guard(e, vc_ensemble_free);
        char* js = nullptr;
        check(vc_ensemble_summary(m.m, e, &js));
        json summary = json::parse(take(js));
        summary["contract"] = {{"form", form}, {"y0", num(c.y0)}, {"z", num(z)}};
        summary["contract"][form == "fb" ? "sigma" : "gamma"] = num(form == "fb" ? sigma : gamma);
        summary["seed"] = sim.seed;

        std::string qv_csv;
        if (sim.trace_paths > 0) {
            std::size_t n = 0;
            check(vc_realized_qv(e, 0, sim.qv_window, nullptr, 0, &n));
            std::vector<double> est(n);
            check(vc_realized_qv(e, 0, sim.qv_window, est.data(), n, &n));
            double mean = 0;
            for (double v : est) mean += v;
            mean /= double(std::max<std::size_t>(n, 1));
            summary["realized_qv_density_path0_mean"] = num(mean);
            qv_csv = "window_end_step,estimate\n";
            for (std::size_t k = 0; k < n; ++k) qv_csv += std::to_string(sim.qv_window + k) + "," + fmt12(est[k]) + "\n";
        }
        char* csv = nullptr;
        check(vc_ensemble_traces_csv(e, &csv));
        const std::string traces = take(csv);

        const auto n_inf = summary["n_infeasible"].get<std::size_t>();
        std::cout << "paths      " << summary["n_paths"] << " x " << summary["n_steps"] << " steps\n"
                  << "agent      " << summary["agent_objective"]["mean"] << " +- "
                  << summary["agent_objective"]["std_error"] << "\n"
                  << "principal  " << summary["principal_objective"]["mean"] << " +- "
                  << summary["principal_objective"]["std_error"] << "\n"
                  << "infeasible " << n_inf << "\n";
        base.out.prepare();
        base.out.write("summary.json", summary.dump(2) + "\n");
        base.out.write("paths.csv", traces);
        if (!qv_csv.empty()) base.out.write("qv_density.csv", qv_csv);
        if (n_inf == sim.paths) throw Failure{2, "no feasible path: the target variance is not achievable"};
        return 0;
    }
};

// ---- best-response --------------------------------------------------------

struct BestResponseCmd {
    Base base;
    SimFlags sim;
    std::optional<double> y0;
    double z = 0.0, tol_s = 0.0;
    double sigma = 1.0;
    std::vector<double> deviations;
    std::string deviation_form = "cpt";
    double deviation_gamma = 0.0;

    void add(CLI::App* app) {
        base.add(app);
        sim.add(app);
        sim.trace_paths = 0;
        app->add_option("--y0", y0, "initial value (default: R_A)");
        app->add_option("--z", z, "loading on dX");
        app->add_option("--sigma", sigma, "quadratic-variation density of the contract");
        app->add_option("--deviations", deviations,
                        "constant controls to test, control_dim values per deviation");
        app->add_option("--deviation-form", deviation_form, "evaluate deviations under cpt or fb")
            ->check(CLI::IsMember({"cpt", "fb"}));
        app->add_option("--deviation-gamma", deviation_gamma, "Gamma used for cpt deviations");
        app->add_option("--tol-s", tol_s, "variance band, <= 0 selects the default");
    }

    int run() {
        Model m(base.config);
        Grid g(m, base.grid);
        const std::size_t d = vc_model_control_dim(m.m);
        if (d == 0 || d > VC_MAX_CONTROLS) throw Failure{1, "unsupported control dimension"};
        if (deviations.size() % d != 0) throw Failure{1, "--deviations needs a multiple of the control dimension"};
        std::vector<vc_deviation> devs(deviations.size() / d);
        for (std::size_t j = 0; j < devs.size(); ++j) {
            devs[j].control_dim = d;
            for (std::size_t i = 0; i < d; ++i) devs[j].control[i] = deviations[j * d + i];
            devs[j].use_cpt = deviation_form == "cpt";
            devs[j].gamma = deviation_gamma;
        }
        const vc_sim_config cfg = sim.config();
        char* js = nullptr;
        const double y = y0.value_or(vc_model_reservation(m.m));
        check(vc_best_response(m.m, g.g, y, z, sigma, devs.data(), devs.size(), &cfg, tol_s, &js));
        const std::string text = take(js);
        const json r = json::parse(text);
        std::cout << "on-policy  " << r["on_policy_value"]["mean"] << " +- " << r["on_policy_value"]["std_error"]
                  << " (y0 " << r["y0"] << ")\n";
        for (const auto& dv : r["deviations"])
            std::cout << "deviation  " << dv["control"].dump() << "  " << dv["value"]["mean"] << "  "
                      << (dv["ok"].get<bool>() ? "ok" : "BEATS CONTRACT") << "\n";
        std::cout << "verdict    " << (r["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
        base.out.prepare();
        base.out.write("best_response.json", text + "\n");
        return 0;
    }
};

// ---- equivalence ----------------------------------------------------------

struct EquivalenceCmd {
    Base base;
    SimFlags sim;
    std::size_t z_steps = 101, gamma_steps = 101, s_steps = 101;
    double z_min = 0.0, z_max = 1.0, gamma_min = -5.0, gamma_max = 0.0;
    std::optional<double> s_min, s_max;
    double tol_s = 0.0;

    void add(CLI::App* app) {
        base.add(app);
        sim.add(app);
        sim.trace_paths = 0;
        app->add_option("--z-steps", z_steps, "points of the z grid");
        app->add_option("--z-min", z_min, "z grid lower end");
        app->add_option("--z-max", z_max, "z grid upper end");
        app->add_option("--gamma-steps", gamma_steps, "points of the Gamma grid");
        app->add_option("--gamma-min", gamma_min, "Gamma grid lower end");
        app->add_option("--gamma-max", gamma_max, "Gamma grid upper end");
        app->add_option("--s-steps", s_steps, "points of the S grid");
        app->add_option("--s-min", s_min, "smallest S (default: S grid step)");
        app->add_option("--s-max", s_max, "largest S (default: largest lattice variance)");
        app->add_option("--tol-s", tol_s, "variance band, <= 0 selects the default");
    }

    int run() {
        Model m(base.config);
        Grid g(m, base.grid);
        double lo = 0, hi = 0;
        check(vc_variance_range(m.m, g.g, 0.0, model_x0(m), &lo, &hi));
        const double top = s_max.value_or(hi);
        // open at zero: start one step in
        const double bottom = s_min.value_or(std::max(lo, top / double(std::max<std::size_t>(s_steps, 1))));
        const auto zg = linspace(z_min, z_max, z_steps);
        const auto gg = linspace(gamma_min, gamma_max, gamma_steps);
        const auto sg = linspace(bottom, top, s_steps);
        const vc_sim_config cfg = sim.config();
        char *js = nullptr, *a = nullptr, *b = nullptr;
        check(vc_equivalence_scan(m.m, g.g, zg.data(), zg.size(), gg.data(), gg.size(), sg.data(), sg.size(), &cfg,
                                  tol_s, &js, &a, &b));
        const std::string text = take(js), cpt = take(a), fb = take(b);
        const json r = json::parse(text);
        std::cout << "best cpt   z=" << r["best_cpt"]["z"] << " gamma=" << r["best_cpt"]["gamma"] << " value "
                  << r["best_cpt"]["value"]["mean"] << "\n"
                  << "best fb    z=" << r["best_fb"]["z"] << " S=" << r["best_fb"]["S"] << " value "
                  << r["best_fb"]["value"]["mean"] << "\n"
                  << "gap        " << r["value_gap"] << " (pooled std error " << r["pooled_std_error"] << ")\n"
                  << "S(gamma*)  " << r["sigma_of_best_gamma"] << ", corresponding "
                  << (r["corresponding"].get<bool>() ? "true" : "false") << "\n";
        base.out.prepare();
        base.out.write("equivalence.json", text + "\n");
        base.out.write("surface_cpt.csv", cpt);
        base.out.write("surface_fb.csv", fb);
        return 0;
    }
};

// ---- example --------------------------------------------------------------

struct ExampleCmd {
    Out out;
    int id = 3;
    double T = 1.0, x0 = 0.0, y0 = 0.0;
    double gamma_a = 1.0, gamma_p = 1.0, h = 1.0, r_a = -1.0;
    std::vector<double> sigmas{1.0, 1.0}, lambdas{1.0, 4.0}, mus{1.0, 1.0};
    double kappa = 0.0;
    std::size_t s_steps = 10001, gamma_steps = 12001;

    void add(CLI::App* app) {
        app->add_option("id", id, "worked example: 1, 2 or 3")->required()->check(CLI::IsMember({1, 2, 3}));
        app->add_option("--out", out.dir, "output directory");
        app->add_option("--T", T, "horizon");
        app->add_option("--x0", x0, "initial output (examples 1 and 3)");
        app->add_option("--y0", y0, "initial contract value (example 3)");
        app->add_option("--gamma-a", gamma_a, "agent risk aversion (example 1)");
        app->add_option("--gamma-p", gamma_p, "principal risk aversion (example 1)");
        app->add_option("--qv-penalty", h, "quadratic-variation penalty h (example 1)");
        app->add_option("--R-A", r_a, "reservation utility (example 1)");
        app->add_option("--sigmas", sigmas, "volatility weights (example 2)");
        app->add_option("--lambdas", lambdas, "volatility cost parameters (example 2)");
        app->add_option("--mus", mus, "drift cost parameters (example 2)");
        app->add_option("--kappa", kappa, "state reward (example 2)");
        app->add_option("--s-steps", s_steps, "S grid points (example 3)");
        app->add_option("--gamma-steps", gamma_steps, "Gamma grid points (example 3)");
    }

    int run() {
        char* js = nullptr;
        std::string file;
        if (id == 1) {
            check(vc_example1(gamma_a, gamma_p, h, T, x0, r_a, &js));
            file = "ex1_solution.json";
        } else if (id == 2) {
            if (lambdas.size() != sigmas.size() || mus.size() != sigmas.size())
                throw Failure{1, "--sigmas, --lambdas and --mus need the same length"};
            check(vc_example2(sigmas.data(), lambdas.data(), mus.data(), sigmas.size(), kappa, &js));
            file = "ex2_solution.json";
        } else {
            check(vc_example3(T, x0, y0, s_steps, gamma_steps, &js));
            file = "ex3_gap.json";
        }
        const std::string text = take(js);
        const json r = json::parse(text);
        std::printf("%-22s %-16s %-16s %s\n", "quantity", "closed form", "solver", "abs error");
        for (const auto& [name, q] : r["quantities"].items()) {
            auto val = [](const json& v) { return v.is_null() ? NAN : v.get<double>(); };
            std::printf("%-22s %-16.10g %-16.10g %.3g\n", name.c_str(), val(q["closed_form"]), val(q["solver"]),
                        val(q["abs_error"]));
        }
        out.prepare();
        out.write(file, text + "\n");
        return 0;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volatility contracting toolkit"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", std::string(vc_version()));

    HamiltonianCmd ham;
    DualityCmd dual;
    SimulateCmd simc;
    BestResponseCmd br;
    EquivalenceCmd eq;
    ExampleCmd ex;
    auto* s_ham = app.add_subcommand("hamiltonian", "agent Hamiltonian suprema at one state");
    auto* s_dual = app.add_subcommand("duality", "constrained Hamiltonian against its biconjugate");
    auto* s_sim = app.add_subcommand("simulate", "simulate output and contract paths");
    auto* s_br = app.add_subcommand("best-response", "check that constant deviations do not beat a contract");
    auto* s_eq = app.add_subcommand("equivalence", "scan Gamma-form and first-best contracts");
    auto* s_ex = app.add_subcommand("example", "worked examples with closed forms");
    for (auto* s : {s_ham, s_dual, s_sim, s_br, s_eq, s_ex}) s->option_defaults()->always_capture_default();
    ham.add(s_ham);
    dual.add(s_dual);
    simc.add(s_sim);
    br.add(s_br);
    eq.add(s_eq);
    ex.add(s_ex);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*s_ham) return ham.run(s_ham);
        if (*s_dual) return dual.run();
        if (*s_sim) return simc.run();
        if (*s_br) return br.run();
        if (*s_eq) return eq.run();
        if (*s_ex) return ex.run();
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
