#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vcontract/config.hpp"
#include "vcontract/error.hpp"

using namespace vcontract;

namespace {

const char* kDemand = R"({"example":"demand-response","sigmas":[1,1],"lambdas":[1,4],"mus":[1,1]})";

}

TEST_CASE("built-in model construction") {
    ModelSpec q = build_model(R"({"example":"quartic","T":1,"x0":0})");
    REQUIRE(q.control_dim() == 1);
    CHECK(q.control_box[0].lo == -1.0);
    CHECK(q.control_box[0].hi == 1.0);
    CHECK(q.coefficients->principal_running_cost(0, 0, 0.5) == doctest::Approx(0.125));

    ModelSpec s = build_model(R"({"example":"scalar-vol","gamma_A":1,"gamma_P":1,"h":1,"T":1})");
    CHECK(s.control_box[0].lo == doctest::Approx(1e-3));
    CHECK(s.control_box[0].hi == 1.0);
    CHECK(s.agent_utility.exponential());
    const double u = 0.5;
    CHECK(eval_coefficients(s, 0, 0, {&u, 1}).cost == doctest::Approx(2.0));

    CHECK_THROWS_AS(build_model(R"({"example":"scalar-vol","T":0})"), ValidationError);
    CHECK_THROWS_AS(build_model(R"({"example":"nope"})"), ValidationError);
    CHECK_THROWS_AS(build_model(R"({"example":"quartic","bogus":1})"), ValidationError);
    CHECK_THROWS_AS(build_model("{not json"), ValidationError);
    CHECK_THROWS_AS(build_model_file("/nonexistent/model.json"), ValidationError);
}

TEST_CASE("eval_coefficients examples") {
    ModelSpec q = make_quartic({});
    const double u = 0.5;
    auto c = eval_coefficients(q, 0, 0, {&u, 1});
    CHECK(c.variance == doctest::Approx(0.25));
    CHECK(c.cost == doctest::Approx(0.9375));

    ModelSpec s = make_scalar_vol({});
    const double one = 1.0;
    auto cs = eval_coefficients(s, 0, 0, {&one, 1});
    CHECK(cs.variance == doctest::Approx(1.0));
    CHECK(cs.cost == doctest::Approx(0.5));

    ModelSpec d = build_model(kDemand);
    const double ud[4] = {0.3, 0.3, 1.0, 0.5};
    auto cd = eval_coefficients(d, 0, 0, {ud, 4});
    CHECK(cd.variance == doctest::Approx(1.5));
    CHECK(cd.drift == doctest::Approx(-0.6));
    CHECK(cd.noise_dim == 2);
    double v = 0;
    for (double r : cd.diffusion_row()) v += r * r;
    CHECK(v == doctest::Approx(cd.variance));

    const double outside = 2.0;
    CHECK_THROWS_AS(eval_coefficients(q, 0, 0, {&outside, 1}), ValidationError);
    CHECK_THROWS_AS(eval_coefficients(q, 0, 0, {ud, 2}), ValidationError);
}

TEST_CASE("achievable variance sets") {
    ModelSpec q = make_quartic({});
    auto set = achievable_variance_set(q, 0, 0, ControlGrid::for_model(q, {201}));
    REQUIRE(!set.empty());
    CHECK(set.front().variance == doctest::Approx(0.0));
    CHECK(set.front().witness[0] == doctest::Approx(0.0));
    CHECK(set.back().variance == doctest::Approx(1.0));
    CHECK(std::abs(set.back().witness[0]) == doctest::Approx(1.0));

    ModelSpec s = make_scalar_vol({});
    ControlGrid single({{1.0, 1.0}}, {1});
    auto ss = achievable_variance_set(s, 0, 0, single);
    REQUIRE(ss.size() == 1);
    CHECK(ss[0].variance == doctest::Approx(1.0));
    CHECK(ss[0].witness[0] == 1.0);

    ModelSpec d = build_model(kDemand);
    ControlGrid gd = ControlGrid::for_model(d, {1, 1, 21, 21});
    auto sd = achievable_variance_set(d, 0, 0, gd);
    CHECK(sd.front().variance == doctest::Approx(0.0));
    CHECK(sd.back().variance == doctest::Approx(4.0));

    // every lattice variance is represented within tol
    const double tol = 1e-9;
    auto sq = achievable_variance_set(q, 0, 0, ControlGrid::for_model(q, {101}), tol);
    ControlGrid::for_model(q, {101}).for_each([&](std::size_t, const double* u) {
        CoefficientEval c;
        q.evaluate(0, 0, u, c);
        auto it = std::lower_bound(sq.begin(), sq.end(), c.variance - tol,
                                   [](const VariancePoint& p, double v) { return p.variance < v; });
        REQUIRE(it != sq.end());
        CHECK(std::abs(it->variance - c.variance) <= tol);
    });
}

TEST_CASE("control grid layout") {
    ControlGrid g({{-1, 1}, {0, 2}}, {3, 5});
    CHECK(g.size() == 15);
    CHECK(g.step(0) == doctest::Approx(1.0));
    CHECK(g.step(1) == doctest::Approx(0.5));
    auto p = g.point(7);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(1.0));
    std::size_t n = 0;
    g.for_each([&](std::size_t flat, const double* u) {
        auto q = g.point(flat);
        CHECK(u[0] == q[0]);
        CHECK(u[1] == q[1]);
        ++n;
    });
    CHECK(n == 15);
    ControlGrid c = g.coarsened();
    CHECK(c.counts()[0] == 2);
    CHECK(c.counts()[1] == 3);
    CHECK(ControlGrid({{0.5, 0.5}}, {7}).size() == 1);
}

TEST_CASE("custom catalogue model") {
    ModelSpec m = build_model(R"({
        "custom": {
            "controls": [[0, 1], [-1, 1]],
            "drift": [{"c": 2, "u0": 1}, {"c": 1, "x": 1}],
            "vol": [[{"c": 1, "u0": 1}]],
            "cost": [{"c": 0.5, "u1": 2}],
            "principal_running_cost": [{"c": 1, "S": 2}]
        },
        "T": 2, "x0": 1, "R_A": 0})");
    CHECK(m.horizon == 2.0);
    CHECK(m.traits.state_dependent);
    CHECK(!m.traits.time_dependent);
    const double u[2] = {0.5, -1.0};
    auto c = eval_coefficients(m, 0.0, 3.0, {u, 2});
    CHECK(c.drift == doctest::Approx(4.0));
    CHECK(c.variance == doctest::Approx(0.25));
    CHECK(c.cost == doctest::Approx(0.5));
    CHECK(m.coefficients->principal_running_cost(0, 0, 3.0) == doctest::Approx(9.0));
    CHECK(m.coefficients->liquidation(2.5) == doctest::Approx(2.5));

    CHECK_THROWS_AS(build_model(R"({"custom":{"controls":[[0,1]],"vol":[[{"u3":1}]],"cost":0}})"),
                    ValidationError);
    // negative cost violates the model invariant
    CHECK_THROWS_AS(build_model(R"({"custom":{"controls":[[0,1]],"vol":[[{"u0":1}]],"cost":[{"c":-1}]}})"),
                    ValidationError);
}

TEST_CASE("utilities") {
    Utility lin;
    CHECK(lin(2.0) == 2.0);
    CHECK(lin.inverse(2.0) == 2.0);
    Utility ex{UtilityKind::exponential, 2.0};
    CHECK(ex(0.0) == doctest::Approx(-1.0));
    CHECK(ex.inverse(ex(0.3)) == doctest::Approx(0.3));
}
