#include <doctest.h>

#include <cmath>
#include <cstring>

#include "vcontract/config.hpp"
#include "vcontract/duality.hpp"
#include "vcontract/error.hpp"
#include "vcontract/simulate.hpp"

using namespace vcontract;

namespace {

SimConfig small(std::size_t paths, std::size_t steps) {
    SimConfig c;
    c.n_paths = paths;
    c.n_steps = steps;
    c.qv_window = std::min<std::size_t>(steps, 100);
    return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool identical(const PathEnsemble& a, const PathEnsemble& b) {
    if (a.terminal.size() != b.terminal.size()) return false;
    for (std::size_t i = 0; i < a.terminal.size(); ++i) {
        const auto &s = a.terminal[i], &t = b.terminal[i];
        if (!same_bits(s.x, t.x) || !same_bits(s.y, t.y) || !same_bits(s.qv_realized, t.qv_realized) ||
            !same_bits(s.cost_int, t.cost_int))
            return false;
    }
    for (std::size_t i = 0; i < a.traces.size(); ++i)
        for (std::size_t k = 0; k < a.traces[i].x.size(); ++k)
            if (!same_bits(a.traces[i].x[k], b.traces[i].x[k]) || !same_bits(a.traces[i].y[k], b.traces[i].y[k]))
                return false;
    return true;
}

} // namespace

TEST_CASE("config validation") {
    SimConfig c;
    c.n_paths = 0;
    CHECK_THROWS_WITH_AS(c.validate(), "n_paths must be ≥ 1", ValidationError);
    c.n_paths = 10;
    c.qv_window = 5000;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("seed determinism across runs and worker counts") {
    ModelSpec s = make_scalar_vol({});
    ControlGrid g = ControlGrid::for_model(s, {2001});
    ContractCPT k{-1.0, Policy::constant(0.5), Policy::constant(-2.5)};
    SimConfig one = small(1, 4);
    CHECK(identical(simulate_cpt(s, k, one, g), simulate_cpt(s, k, one, g)));

    SimConfig a = small(300, 50);
    a.workers = 1;
    SimConfig b = a;
    b.workers = 4;
    auto ea = simulate_cpt(s, k, a, g);
    auto eb = simulate_cpt(s, k, b, g);
    CHECK(identical(ea, eb));
    SimConfig c = a;
    c.master_seed = 43;
    CHECK(!identical(ea, simulate_cpt(s, k, c, g)));

    // a state-dependent model runs through the uncached oracle
    ModelSpec m = build_model(R"({"custom":{"controls":[[0,1]],"drift":[{"c":-0.1,"x":1}],
        "vol":[[{"c":1,"u0":1}]],"cost":[{"c":0.5,"u0":2},{"c":0.1,"x":2,"u0":2}]},"T":1,"x0":0.5,"R_A":0,"grid":[101]})");
    ControlGrid gm = ControlGrid::for_model(m);
    ContractCPT km{0.0, Policy::constant(0.3), Policy::constant(-1.0)};
    SimConfig d = small(40, 20);
    d.workers = 1;
    SimConfig e = d;
    e.workers = 3;
    CHECK(identical(simulate_cpt(m, km, d, gm), simulate_cpt(m, km, e, gm)));
}

TEST_CASE("quartic maximiser branches") {
    ModelSpec q = make_quartic({});
    ControlGrid g = ControlGrid::for_model(q, {2001});
    SimConfig cfg = small(20, 200);
    cfg.trace_paths = 20;

    auto e0 = simulate_cpt(q, {0.0, Policy::constant(0.0), Policy::constant(0.0)}, cfg, g);
    for (const auto& tr : e0.traces)
        for (double u : tr.effort) CHECK(std::abs(u) == doctest::Approx(1.0));
    for (const auto& s : e0.terminal) CHECK(s.qv == doctest::Approx(1.0).epsilon(1e-12));

    auto e3 = simulate_cpt(q, {0.0, Policy::constant(0.0), Policy::constant(-3.0)}, cfg, g);
    for (const auto& s : e3.terminal) {
        CHECK(s.x == 0.0);
        CHECK(s.qv == 0.0);
        CHECK(s.qv_realized == 0.0);
    }

    const double tol = default_variance_tolerance(q, {}, g, 0.25, 0.25);
    auto ef = simulate_fb(q, {0.0, Policy::constant(0.0), Policy::constant(0.25)}, cfg, g, tol);
    for (const auto& tr : ef.traces)
        for (double u : tr.effort) CHECK(std::abs(u) == doctest::Approx(0.5).epsilon(1e-3));
    for (const auto& s : ef.terminal) CHECK(s.qv == doctest::Approx(0.25).epsilon(1e-3));

    // exact zero variance needs a band tighter than the lattice spacing
    auto ez = simulate_fb(q, {0.0, Policy::constant(0.0), Policy::constant(0.0)}, cfg, g, 1e-12);
    for (const auto& s : ez.terminal) CHECK(s.x == 0.0);

    // variance 2 is out of reach: every path is frozen as infeasible
    auto bad = simulate_fb(q, {0.0, Policy::constant(0.0), Policy::constant(2.0)}, cfg, g, 1e-3);
    CHECK(bad.n_infeasible == cfg.n_paths);
    CHECK(bad.traces[0].x.size() == cfg.n_steps + 1);
}

TEST_CASE("first-best at full variance coincides with the Gamma = 0 contract") {
    ModelSpec s = make_scalar_vol({});
    ControlGrid g = ControlGrid::for_model(s, {2001});
    SimConfig cfg = small(50, 100);
    auto a = simulate_fb(s, {-1.0, Policy::constant(0.4), Policy::constant(1.0)}, cfg, g,
                         default_variance_tolerance(s, {}, g, 1.0, 1.0));
    auto b = simulate_cpt(s, {-1.0, Policy::constant(0.4), Policy::constant(0.0)}, cfg, g);
    for (std::size_t i = 0; i < a.terminal.size(); ++i) {
        CHECK(a.terminal[i].x == b.terminal[i].x);
        CHECK(a.terminal[i].y == doctest::Approx(b.terminal[i].y).epsilon(1e-12));
    }
}

TEST_CASE("feedback policies") {
    ModelSpec q = make_quartic({});
    ControlGrid g = ControlGrid::for_model(q, {201});
    // Gamma switches branch halfway through the horizon
    Policy gamma([](double t, double, double) { return t < 0.5 ? 0.0 : -3.0; });
    CHECK(!gamma.is_constant());
    SimConfig cfg = small(5, 100);
    auto e = simulate_cpt(q, {0.0, Policy::constant(0.0), gamma}, cfg, g);
    for (const auto& s : e.terminal) CHECK(s.qv == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("realized quadratic variation") {
    ModelSpec q = make_quartic({});
    ControlGrid g = ControlGrid::for_model(q, {201});
    SimConfig cfg = small(4, 1000);
    cfg.qv_window = 100;
    auto e = simulate_cpt(q, {0.0, Policy::constant(0.0), Policy::constant(0.0)}, cfg, g);
    auto series = realized_qv_density(e, 0, 100);
    CHECK(series.estimate.size() == 901);
    double mean = 0;
    for (double v : series.estimate) mean += v;
    mean /= double(series.estimate.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(0.15));
    for (std::size_t k = 1; k < e.traces[0].qv_realized.size(); ++k)
        CHECK(e.traces[0].qv_realized[k] >= e.traces[0].qv_realized[k - 1]);

    auto flat = simulate_cpt(q, {0.0, Policy::constant(0.0), Policy::constant(-3.0)}, cfg, g);
    for (double v : realized_qv_density(flat, 1, 100).estimate) CHECK(v == 0.0);
    CHECK_THROWS_AS(realized_qv_density(e, 99, 100), ValidationError);
    CHECK_THROWS_AS(realized_qv_density(e, 0, 5000), ValidationError);
}

TEST_CASE("objectives on known contracts") {
    ModelSpec s = make_scalar_vol({});
    ControlGrid gs = ControlGrid::for_model(s);
    SimConfig cfg = small(20000, 200);
    const double S = 1.0 / std::sqrt(2.5);
    auto e = simulate_fb(s, {-1.0, Policy::constant(0.5), Policy::constant(S)}, cfg, gs,
                         default_variance_tolerance(s, {}, gs, S, S));
    auto a = agent_objective(s, e);
    CHECK(std::abs(a.mean + 1.0) <= 3.0 * a.std_error + 5.0 / 200.0);

    ModelSpec q = make_quartic({});
    ControlGrid gq = ControlGrid::for_model(q);
    auto eq = simulate_fb(q, {0.0, Policy::constant(0.0), Policy::constant(2.0 / 3.0)}, cfg, gq,
                          default_variance_tolerance(q, {}, gq, 2.0 / 3.0, 2.0 / 3.0));
    auto p = principal_objective(q, eq);
    CHECK(std::abs(p.mean + 23.0 / 27.0) <= 3.0 * p.std_error + 5.0 / 200.0);

    auto ec = simulate_cpt(q, {0.0, Policy::constant(0.0), Policy::constant(-2.0)}, cfg, gq);
    auto pc = principal_objective(q, ec);
    CHECK(std::abs(pc.mean + 1.0) <= 3.0 * pc.std_error + 5.0 / 200.0);

    // constant samples have zero standard error
    auto m = mc_estimate({2.0, 2.0, 2.0});
    CHECK(m.mean == 2.0);
    CHECK(m.std_error == 0.0);
}

TEST_CASE("constant-policy evaluator reproduces the simulator") {
    ModelSpec s = make_scalar_vol({});
    REQUIRE(ConstantPolicyEvaluator::eligible(s));
    ControlGrid g = ControlGrid::for_model(s, {2001});
    SimConfig cfg = small(500, 100);
    ConstantPolicyEvaluator ev(s, cfg);

    const double z = 0.5, gamma = -2.5;
    auto h = hamiltonian_full(s, {0, s.x0, 0, z}, gamma, g);
    auto fast = ev.terminal(ContractForm::cpt, -1.0, z, gamma, h.value, h.argmax.data());
    auto slow = simulate_cpt(s, {-1.0, Policy::constant(z), Policy::constant(gamma)}, cfg, g);
    REQUIRE(fast.size() == slow.terminal.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i].x == doctest::Approx(slow.terminal[i].x).epsilon(1e-9));
        CHECK(fast[i].y == doctest::Approx(slow.terminal[i].y).epsilon(1e-9));
        CHECK(fast[i].qv_realized == doctest::Approx(slow.terminal[i].qv_realized).epsilon(1e-9));
    }
    auto pf = ev.principal_objective(ContractForm::cpt, -1.0, z, gamma, h.value, h.argmax.data());
    auto ps = principal_objective(s, slow);
    CHECK(pf.mean == doctest::Approx(ps.mean).epsilon(1e-9));
    CHECK(pf.std_error == doctest::Approx(ps.std_error).epsilon(1e-6));

    // quartic: linear utilities and a running principal cost
    ModelSpec q = make_quartic({});
    ControlGrid gq = ControlGrid::for_model(q, {2001});
    ConstantPolicyEvaluator eq(q, cfg);
    const double S = 0.36;
    const double tol = default_variance_tolerance(q, {}, gq, S, S);
    auto hc = hamiltonian_constrained(q, {0, 0, 0, 0.2}, S, gq, tol);
    auto ef = eq.principal_objective(ContractForm::fb, 0.1, 0.2, 0.0, hc.value, hc.argmax.data());
    auto es = principal_objective(q, simulate_fb(q, {0.1, Policy::constant(0.2), Policy::constant(S)}, cfg, gq, tol));
    CHECK(ef.mean == doctest::Approx(es.mean).epsilon(1e-9));

    ModelSpec state = build_model(R"({"custom":{"controls":[[0,1]],"drift":[{"c":1,"x":1}],
        "vol":[[{"u0":1}]],"cost":0},"T":1,"x0":1,"R_A":0})");
    CHECK(!ConstantPolicyEvaluator::eligible(state));
}

TEST_CASE("non-finite states are reported") {
    ModelSpec m = build_model(R"({"custom":{"controls":[[0,1]],"drift":[{"c":1,"x":2}],
        "vol":[[{"c":0.1,"u0":1}]],"cost":0},"T":1,"x0":1e100,"R_A":0,"grid":[3]})");
    ControlGrid g = ControlGrid::for_model(m);
    CHECK_THROWS_AS(simulate_cpt(m, {0.0, Policy::constant(0.0), Policy::constant(0.0)}, small(2, 10), g),
                    NumericalError);
}
