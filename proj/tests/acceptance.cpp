// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "vcontract/config.hpp"
#include "vcontract/verify.hpp"

using namespace vcontract;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

ModelSpec demand_response(std::vector<Interval> b_box = {{0.0, 2.0}}) {
    DemandResponseParams p;
    p.sigmas = {1.0, 1.0};
    p.lambdas = {1.0, 4.0};
    p.mus = {1.0, 1.0};
    p.b_box = std::move(b_box);
    return make_demand_response(p);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// 1. example 3 totals
Outcome criterion1() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto e = example3_gap(1.0, 0.0, 0.0, 10001, 12001);
    const double dt = seconds_since(t0);
    const double fb = e.get("first_best_total").solver;
    const double rt = e.get("restricted_total").solver;
    o.check(std::abs(fb + 23.0 / 27.0) <= 1e-6, fmt("first_best_total %.9f (target %.9f)", fb, -23.0 / 27.0));
    o.check(std::abs(rt + 1.0) <= 1e-6, fmt("restricted_total %.9f (target -1)", rt));
    o.check(dt < 1.0, fmt("runtime %.3fs < 1s", dt));
    return o;
}

// 2. duality verdicts at default grids
Outcome criterion2() {
    Outcome o;
    GammaGrid gg;
    const auto gammas = gg.values();
    struct Case {
        std::string name;
        ModelSpec model;
        std::vector<double> s_grid;
        bool expect;
    };
    std::vector<Case> cases;
    cases.push_back({"scalar-vol", make_scalar_vol({}), uniform_grid(0.01, 1.0, 100), true});
    cases.push_back({"demand-response", demand_response(), uniform_grid(0.04, 4.0, 100), true});
    cases.push_back({"quartic", make_quartic({}), uniform_grid(0.0, 1.0, 101), false});
    for (const auto& c : cases) {
        const auto t0 = Clock::now();
        const auto r = duality_report(c.model, {0.0, c.model.x0, 0.0, 0.0}, c.s_grid, gammas,
                                      ControlGrid::for_model(c.model));
        const double dt = seconds_since(t0);
        o.check(r.holds == c.expect,
                fmt("%s holds=%s max_gap=%.3g tol_gap=%.3g eps_grid=%.3g clamped=%zu", c.name.c_str(),
                    r.holds ? "true" : "false", r.max_gap, r.tol_gap, r.eps_grid, r.n_clamped));
        if (!c.expect) {
            const double step = c.s_grid[1] - c.s_grid[0];
            o.check(std::abs(r.max_gap - 0.25) <= 5.0 * r.eps_grid,
                    fmt("%s max_gap %.6f = 0.25 +- 5 eps_grid", c.name.c_str(), r.max_gap));
            o.check(std::abs(r.witness_S - 0.5) <= step + 1e-12,
                    fmt("%s witness_S %.4f = 0.5 +- %.3g", c.name.c_str(), r.witness_S, step));
        }
        o.check(dt < 10.0, fmt("%s runtime %.2fs < 10s", c.name.c_str(), dt));
    }
    return o;
}

// 3. closed-form optimum recovered by the scan
Outcome criterion3() {
    Outcome o;
    const ModelSpec m = make_scalar_vol({});
    const ControlGrid grid = ControlGrid::for_model(m);
    const auto z = uniform_grid(0.0, 1.0, 101);
    const auto gam = uniform_grid(-5.0, 0.0, 101);
    const auto S = uniform_grid(0.01, 1.0, 101);
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.n_steps = 1000;
    const double tol = default_variance_tolerance(m, {0.0, m.x0, 0.0, 0.0}, grid, S.front(), S.back());
    const auto t0 = Clock::now();
    const auto r = equivalence_scan(m, z, gam, S, cfg, grid, tol);
    const double dt = seconds_since(t0);
    const double zs = z[1] - z[0], ss = S[1] - S[0], gs = gam[1] - gam[0];
    const double s_star = 1.0 / std::sqrt(2.5);
    o.check(std::abs(r.best_fb.z - 0.5) <= zs + 1e-12, fmt("best_fb z=%.4f", r.best_fb.z));
    o.check(std::abs(r.best_fb.param - s_star) <= ss + 1e-12, fmt("best_fb S=%.5f (target %.5f)", r.best_fb.param, s_star));
    o.check(std::abs(r.best_cpt.z - 0.5) <= zs + 1e-12, fmt("best_cpt z=%.4f", r.best_cpt.z));
    o.check(std::abs(r.best_cpt.param + 2.5) <= gs + 1e-12, fmt("best_cpt gamma=%.4f", r.best_cpt.param));
    o.check(r.value_gap <= 3.0 * r.pooled_std_error,
            fmt("value_gap %.3g <= 3 * %.3g", r.value_gap, r.pooled_std_error));
    o.detail += fmt("; runtime %.1fs", dt);
    return o;
}

// 4. agent value equals y0 and no constant deviation beats the contract
Outcome criterion4() {
    Outcome o;
    const ModelSpec m = make_scalar_vol({});
    const ControlGrid grid = ControlGrid::for_model(m);
    const double S = 1.0 / std::sqrt(2.5);
    const ContractFB k{-1.0, Policy::constant(0.5), Policy::constant(S)};
    std::vector<Deviation> devs;
    for (double u : {0.5, 0.7, 0.9, 1.0}) devs.push_back({fmt("nu=%.1f", u), {u}, true, -2.5});
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.n_steps = 1000;
    const double tol = default_variance_tolerance(m, {0.0, m.x0, 0.0, 0.0}, grid, S, S);
    const auto r = best_response_check(m, k, devs, cfg, grid, tol);
    o.check(r.value_matches_y0, fmt("on-policy %.5f +- %.2g vs y0 = -1 (allowance %.3g)",
                                    r.on_policy_value.mean, r.on_policy_value.std_error, r.allowance));
    for (const auto& d : r.deviation_values)
        o.check(d.ok, fmt("%s %.5f", d.deviation.description.c_str(), d.value.mean));
    o.check(r.pass, "pass flag");
    return o;
}

// 5. sigma/gamma round trip
Outcome criterion5() {
    Outcome o;
    GammaGrid gg;
    const auto gammas = gg.values();
    const double step = gg.step();

    const ModelSpec sv = make_scalar_vol({});
    const ControlGrid gsv = ControlGrid::for_model(sv, {50001});
    const StatePoint p{0.0, sv.x0, 0.0, 0.0};
    for (double g : {-1.5, -2.0, -4.0, -9.0}) {
        const double S = sigma_from_gamma(sv, p, g, gsv);
        const double back = gamma_from_sigma(sv, p, S, gammas, gsv);
        const double target = 1.0 / std::sqrt(-g);
        const double band = default_variance_tolerance(sv, p, gsv, target, target);
        o.check(std::abs(back - g) <= 2.0 * step, fmt("scalar-vol %.1f -> S=%.6f -> %.4f", g, S, back));
        o.check(std::abs(S - target) <= band, fmt("S*(%.1f) %.6f vs %.6f", g, S, target));
    }

    // b lattice restricted to a box around the interior optima so the spacing is fine enough
    const ModelSpec dr = demand_response({{0.45, 1.45}, {0.2, 0.75}});
    const ControlGrid gdr = ControlGrid::for_model(dr, {1, 1, 6668, 3668});
    const StatePoint q{0.0, dr.x0, 0.0, 0.0};
    for (double g : {-0.5, -1.0, -4.0}) {
        const double S = sigma_from_gamma(dr, q, g, gdr);
        const double back = gamma_from_sigma(dr, q, S, gammas, gdr);
        const double target = 1.5 / std::sqrt(-g);
        o.check(std::abs(back - g) <= 2.0 * step, fmt("demand-response %.1f -> S=%.6f -> %.4f", g, S, back));
        o.check(std::abs(S - target) <= 1e-3, fmt("S*(%.1f) %.6f vs %.6f", g, S, target));
    }
    return o;
}

// 6. conjugate identity
Outcome criterion6() {
    Outcome o;
    struct Case {
        std::string name;
        ModelSpec model;
        double z;
        std::vector<double> s_grid;
        std::vector<double> gammas;
    };
    std::vector<Case> cases;
    cases.push_back({"scalar-vol", make_scalar_vol({}), 0.5, uniform_grid(1e-3, 1.0, 2000),
                     uniform_grid(-10.0, 1.0, 20)});
    cases.push_back({"quartic", make_quartic({}), 0.0, uniform_grid(0.0, 1.0, 2001), uniform_grid(-6.0, 2.0, 20)});
    cases.push_back({"demand-response", demand_response(), -0.5, uniform_grid(0.0, 4.0, 4001),
                     uniform_grid(-10.0, 1.0, 20)});
    for (const auto& c : cases) {
        const ControlGrid grid = ControlGrid::for_model(c.model);
        const StatePoint p{0.0, c.model.x0, 0.0, c.z};
        const double tol = default_variance_tolerance(c.model, p, grid, c.s_grid.front(), c.s_grid.back());
        const double spacing = c.s_grid[1] - c.s_grid[0];
        double worst = 0.0, worst_ratio = 0.0;
        bool ok = true;
        for (double g : c.gammas) {
            const double a = conjugate_from_constrained(c.model, p, g, c.s_grid, grid, tol);
            const double b = hamiltonian_full(c.model, p, g, grid).value;
            const double eps = conjugate_error_bound(g, tol, spacing);
            const double err = std::abs(a - b);
            worst = std::max(worst, err);
            worst_ratio = std::max(worst_ratio, eps > 0 ? err / eps : (err > 0 ? INFINITY : 0.0));
            ok = ok && err <= 5.0 * eps;
        }
        o.check(ok, fmt("%s max error %.3g, max error/eps_grid %.3g over %zu gammas", c.name.c_str(), worst,
                        worst_ratio, c.gammas.size()));
    }
    return o;
}

// 7. property suite
Outcome criterion7() {
    Outcome o;
    const ModelSpec m = make_scalar_vol({});
    const ControlGrid grid = ControlGrid::for_model(m);
    const double S = 1.0 / std::sqrt(2.5);
    const double tol = default_variance_tolerance(m, {0.0, m.x0, 0.0, 0.0}, grid, S, S);
    const ContractFB fb{-1.0, Policy::constant(0.5), Policy::constant(S)};

    // determinism
    {
        SimConfig a;
        a.n_paths = 2000;
        a.n_steps = 200;
        a.trace_paths = 10;
        a.workers = 1;
        SimConfig b = a;
        b.workers = 0;
        const auto e1 = simulate_fb(m, fb, a, grid, tol);
        const auto e2 = simulate_fb(m, fb, a, grid, tol);
        const auto e3 = simulate_fb(m, fb, b, grid, tol);
        bool same = true;
        for (std::size_t i = 0; i < e1.terminal.size(); ++i)
            for (const auto* e : {&e2, &e3})
                same = same && same_bits(e1.terminal[i].x, e->terminal[i].x) &&
                       same_bits(e1.terminal[i].y, e->terminal[i].y) &&
                       same_bits(e1.terminal[i].qv_realized, e->terminal[i].qv_realized);
        for (std::size_t i = 0; i < e1.traces.size(); ++i)
            for (std::size_t k = 0; k < e1.traces[i].x.size(); ++k)
                same = same && same_bits(e1.traces[i].x[k], e3.traces[i].x[k]);
        o.check(same, "seed determinism across reruns and worker counts");
    }

    // QV monotone on 1000 paths
    {
        SimConfig c;
        c.n_paths = 1000;
        c.n_steps = 1000;
        c.trace_paths = 1000;
        c.master_seed = 7;
        const auto e = simulate_cpt(m, {-1.0, Policy::constant(0.5), Policy::constant(-2.5)}, c, grid);
        bool mono = e.traces.size() == 1000;
        for (const auto& tr : e.traces)
            for (std::size_t k = 1; k < tr.qv.size(); ++k)
                mono = mono && tr.qv[k] >= tr.qv[k - 1] && tr.qv_realized[k] >= tr.qv_realized[k - 1];
        o.check(mono, "quadratic variation nondecreasing on 1000 paths");
    }

    // realized QV recovery
    {
        SimConfig c;
        c.n_paths = 200;
        c.n_steps = 1000;
        c.trace_paths = 200;
        c.qv_window = 100;
        const ModelSpec q = make_quartic({});
        const ControlGrid gq = ControlGrid::for_model(q);
        struct Run {
            std::string name;
            PathEnsemble ens;
            double target;
        };
        std::vector<Run> runs;
        runs.push_back({"scalar-vol", simulate_fb(m, fb, c, grid, tol), S});
        runs.push_back({"quartic", simulate_fb(q, {0.0, Policy::constant(0.0), Policy::constant(0.25)}, c, gq,
                                               default_variance_tolerance(q, {}, gq, 0.25, 0.25)),
                        0.25});
        for (const auto& r : runs) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < r.ens.traces.size(); ++i)
                for (double v : realized_qv_density(r.ens, i, c.qv_window).estimate) {
                    sum += v;
                    ++n;
                }
            const double mean = sum / double(n);
            o.check(std::abs(mean - r.target) <= 0.05,
                    fmt("%s realized QV %.4f vs %.4f", r.name.c_str(), mean, r.target));
        }
    }

    // weak convergence: nested Brownian paths at dt = 0.1, 0.05, 0.025
    {
        std::vector<double> v;
        for (std::size_t sub : {4u, 2u, 1u}) {
            SimConfig c;
            c.n_paths = 100000;
            c.n_steps = 40 / sub;
            c.noise_substeps = sub;
            c.qv_window = 1;
            c.trace_paths = 0;
            v.push_back(principal_objective(m, simulate_fb(m, fb, c, grid, tol)).mean);
        }
        const double ratio = std::abs(v[0] - v[1]) / std::abs(v[1] - v[2]);
        o.check(ratio >= 1.5 && ratio <= 3.0,
                fmt("weak convergence ratio %.3f (J = %.6f, %.6f, %.6f)", ratio, v[0], v[1], v[2]));
    }
    return o;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"counter-example gap", criterion1},
        {"duality verdicts", criterion2},
        {"closed-form optimum via scan", criterion3},
        {"agent value equals y0", criterion4},
        {"sigma/gamma round trip", criterion5},
        {"conjugate identity", criterion6},
        {"property suite", criterion7},
    };
    int failures = 0;
    // optional arguments select criteria by number
    std::vector<bool> run(criteria.size(), argc == 1);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k >= 1 && k <= int(criteria.size())) run[k - 1] = true;
    }
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!run[i]) continue;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("criterion %zu %s: %s [%s] (%.1fs)\n", i + 1, o.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
