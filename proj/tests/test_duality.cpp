#include <doctest.h>

#include <cmath>
#include <random>

#include "vcontract/config.hpp"
#include "vcontract/duality.hpp"

using namespace vcontract;

namespace {

// O(N*G) reference for the conjugate: max over all lattice points
double brute_conjugate(const ModelSpec& m, const ControlGrid& g, double gamma) {
    double best = -INFINITY;
    g.for_each([&](std::size_t, const double* u) {
        CoefficientEval c;
        m.evaluate(0, 0, u, c);
        best = std::max(best, -c.cost + 0.5 * gamma * c.variance);
    });
    return best;
}

} // namespace

TEST_CASE("uniform grids") {
    auto v = uniform_grid(-1.0, 1.0, 5);
    REQUIRE(v.size() == 5);
    CHECK(v[0] == -1.0);
    CHECK(v[2] == doctest::Approx(0.0));
    CHECK(v[4] == 1.0);
    GammaGrid g;
    CHECK(g.step() == doctest::Approx(1e-3));
}

TEST_CASE("hull conjugate matches brute force") {
    ModelSpec q = make_quartic({});
    ModelSpec s = make_scalar_vol({});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> gd(-12.0, 4.0);
    for (const ModelSpec* m : {&q, &s}) {
        ControlGrid g = ControlGrid::for_model(*m, {1001});
        auto prof = ConjugateProfile::build(*m, {}, g);
        std::vector<double> gs;
        for (int i = 0; i < 50; ++i) gs.push_back(gd(rng));
        std::sort(gs.begin(), gs.end());
        auto batch = prof.hamiltonian(gs);
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const double ref = brute_conjugate(*m, g, gs[i]);
            CHECK(prof.hamiltonian(gs[i]) == doctest::Approx(ref).epsilon(1e-12));
            CHECK(batch[i] == doctest::Approx(ref).epsilon(1e-12));
            CHECK(hamiltonian_full(*m, {}, gs[i], g).value == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("conjugate from constrained") {
    ModelSpec q = make_quartic({});
    ControlGrid g = ControlGrid::for_model(q, {2001});
    auto s_grid = uniform_grid(0.0, 1.0, 1001);
    const double tol = default_variance_tolerance(q, {}, g, 0.0, 1.0);
    CHECK(conjugate_from_constrained(q, {}, 0.0, s_grid, g, tol) == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(conjugate_from_constrained(q, {}, -4.0, s_grid, g, tol) == doctest::Approx(-1.0).epsilon(1e-3));

    ModelSpec s = make_scalar_vol({});
    ControlGrid gs = ControlGrid::for_model(s, {4001});
    auto ss = uniform_grid(0.001, 1.0, 2000);
    const double ts = default_variance_tolerance(s, {}, gs, 0.001, 1.0);
    const double v = conjugate_from_constrained(s, {}, -4.0, ss, gs, ts);
    CHECK(v == doctest::Approx(-2.0).epsilon(2e-3));
    for (double gamma : {-9.0, -4.0, -1.5, -0.5}) {
        const double err = std::abs(conjugate_from_constrained(s, {}, gamma, ss, gs, ts) -
                                    hamiltonian_full(s, {}, gamma, gs).value);
        CHECK(err <= conjugate_error_bound(gamma, ts, ss[1] - ss[0]) + 1e-12);
    }
}

TEST_CASE("biconjugate examples") {
    ModelSpec q = make_quartic({});
    ControlGrid g = ControlGrid::for_model(q, {20001});
    auto gam = uniform_grid(-10.0, 2.0, 12001);
    auto prof = ConjugateProfile::build(q, {}, g);
    auto r = biconjugate(prof, 0.5, gam);
    CHECK(r.value == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(r.gamma_star == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(!r.clamped);
    auto r1 = biconjugate(prof, 1.0, gam);
    CHECK(r1.value == doctest::Approx(0.0).epsilon(1e-6));

    ModelSpec s = make_scalar_vol({});
    ControlGrid gs = ControlGrid::for_model(s, {20001});
    GammaGrid dg;
    auto rs = biconjugate(s, {}, 0.5, dg.values(), gs);
    CHECK(rs.value == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(rs.gamma_star == doctest::Approx(-4.0).epsilon(1e-2));

    // monotone objective on the grid: the minimiser sits on an end
    auto narrow = uniform_grid(-1.0, 0.0, 11);
    CHECK(biconjugate(prof, 0.5, narrow).clamped);
}

TEST_CASE("sigma / gamma correspondence") {
    ModelSpec s = make_scalar_vol({});
    ControlGrid gs = ControlGrid::for_model(s, {20001});
    CHECK(sigma_from_gamma(s, {}, -4.0, gs) == doctest::Approx(0.5).epsilon(1e-3));
    GammaGrid dg;
    CHECK(gamma_from_sigma(s, {}, 0.5, dg.values(), gs) == doctest::Approx(-4.0).epsilon(1e-2));

    ModelSpec q = make_quartic({});
    ControlGrid gq = ControlGrid::for_model(q, {2001});
    CHECK(sigma_from_gamma(q, {}, 0.0, gq) == doctest::Approx(1.0));
    CHECK(gamma_from_sigma(q, {}, 0.5, dg.values(), gq) == doctest::Approx(-2.0).epsilon(1e-2));

    ModelSpec d = build_model(R"({"example":"demand-response","sigmas":[1,1],"lambdas":[1,4],"mus":[1,1]})");
    ControlGrid gd = ControlGrid::for_model(d, {1, 1, 801, 801});
    CHECK(sigma_from_gamma(d, {}, -1.0, gd) == doctest::Approx(1.5).epsilon(1e-2));
    CHECK(gamma_from_sigma(d, {}, 1.5, dg.values(), gd) == doctest::Approx(-1.0).epsilon(2e-2));
}

TEST_CASE("duality report on the quartic model") {
    ModelSpec q = make_quartic({});
    ControlGrid g = ControlGrid::for_model(q, {20001});
    GammaGrid dg;
    std::vector<double> s_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    auto r = duality_report(q, {}, s_grid, dg.values(), g);
    REQUIRE(r.rows.size() == 5);
    const double expected[5] = {0.0, 0.1875, 0.25, 0.1875, 0.0};
    for (int i = 0; i < 5; ++i) CHECK(r.rows[i].gap == doctest::Approx(expected[i]).epsilon(1e-3));
    CHECK(!r.holds);
    CHECK(r.witness_S == doctest::Approx(0.5));
    CHECK(r.max_gap == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(r.tol_gap >= 1e-9);
    for (const auto& row : r.rows) CHECK(row.biconjugate >= row.h_constrained - r.tol_gap);
}

TEST_CASE("duality report holds for the scalar-vol model") {
    ModelSpec s = make_scalar_vol({});
    ControlGrid g = ControlGrid::for_model(s, {20001});
    GammaGrid dg;
    auto s_grid = uniform_grid(0.01, 1.0, 100);
    auto r = duality_report(s, {}, s_grid, dg.values(), g);
    CHECK(r.holds);
    CHECK(r.max_gap <= r.tol_gap);
    for (const auto& row : r.rows) CHECK(row.biconjugate >= row.h_constrained - r.tol_gap);

    DualityOptions strict;
    strict.tol_gap = 1e-300;
    strict.estimate_eps = false;
    auto r2 = duality_report(s, {}, s_grid, dg.values(), g, strict);
    CHECK(r2.tol_gap == 1e-300);
}
