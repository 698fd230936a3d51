#include <cmath>
#include <limits>
#include <numeric>

#include "vcontract/error.hpp"
#include "vcontract/verify.hpp"

namespace vcontract {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SolutionQuantity quantity(std::string name, double closed, double solver, std::string formula) {
    const double err = std::isfinite(closed) && std::isfinite(solver) ? std::abs(closed - solver) : kNaN;
    return {std::move(name), closed, solver, err, std::move(formula)};
}

void positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, std::string(name) + " must be > 0");
}

} // namespace

const SolutionQuantity& ExampleSolution::get(const std::string& name) const {
    for (const auto& q : quantities)
        if (q.name == name) return q;
    throw ValidationError("no quantity named '" + name + "'");
}

HjbSolution example1_hjb_ode(double gamma_a, double gamma_p, double h, double T,
                             std::size_t n_steps, const std::vector<double>& z_grid,
                             const std::vector<double>& s_grid) {
    positive(gamma_a, "gamma_A");
    positive(gamma_p, "gamma_P");
    require(std::isfinite(h) && h >= 0.0, "h must be >= 0");
    require(std::isfinite(T) && T >= 0.0, "T must be >= 0");
    require(n_steps >= 1, "n_steps must be >= 1");
    require(!z_grid.empty() && !s_grid.empty(), "z and S grids must be non-empty");
    HjbSolution out;
    double best = std::numeric_limits<double>::infinity();
    for (double z : z_grid) {
        for (double S : s_grid) {
            require(S > 0.0, "S grid must be > 0");
            const double v = 1.0 / S + gamma_a * S * z * z + 2.0 * h * S +
                             gamma_p * S * (1.0 - z) * (1.0 - z);
            if (v < best) {
                best = v;
                out.z_opt = z;
                out.s_opt = S;
            }
        }
    }
    out.integrand_min = best;
    const double dt = T / double(n_steps);
    out.time.resize(n_steps + 1);
    out.b.assign(n_steps + 1, 0.0);
    for (std::size_t k = 0; k <= n_steps; ++k) out.time[k] = double(k) * dt;
    out.time[n_steps] = T;
    // the integrand is autonomous, so the minimiser is shared by every step
    for (std::size_t k = n_steps; k-- > 0;) out.b[k] = out.b[k + 1] + 0.5 * best * dt;
    return out;
}

ExampleSolution example1_closed_form(double gamma_a, double gamma_p, double h, double T,
                                     double x0, double reservation) {
    positive(gamma_a, "gamma_A");
    positive(gamma_p, "gamma_P");
    require(std::isfinite(h) && h >= 0.0, "h must be >= 0");
    require(std::isfinite(T) && T >= 0.0, "T must be >= 0");
    require(reservation < 0.0, "R_A must be < 0 under exponential utility");

    const double gbar = gamma_p / (gamma_p + gamma_a);
    const double k = 2.0 * h + gamma_a * gbar;
    const double sigma = std::min(1.0, 1.0 / std::sqrt(k));
    const double gamma = -std::max(1.0, k);
    const double nu = std::min(1.0, std::pow(k, -0.25));
    const double b0 = 0.5 * T * (k >= 1.0 ? 2.0 * std::sqrt(k) : 1.0 + k);
    const double ua_inv = -std::log(-reservation) / gamma_a;
    const double vp = -std::exp(-gamma_p * (x0 - ua_inv - b0));

    const auto hjb = example1_hjb_ode(gamma_a, gamma_p, h, T, 1000, uniform_grid(0.0, 1.0, 2001),
                                      uniform_grid(5e-4, 1.0, 2000));
    const double vp_solver = -std::exp(-gamma_p * (x0 - ua_inv - hjb.b.front()));

    ScalarVolParams sp;
    sp.gamma_a = gamma_a;
    sp.gamma_p = gamma_p;
    sp.h = h;
    sp.horizon = T > 0.0 ? T : 1.0;
    sp.x0 = x0;
    sp.reservation = reservation;
    const ModelSpec m = make_scalar_vol(sp);
    const ControlGrid grid = ControlGrid::for_model(m);
    const StatePoint p{0.0, x0, 0.0, hjb.z_opt};
    GammaGrid gg;
    const auto gammas = gg.values();
    const double gamma_solver = gamma_from_sigma(m, p, hjb.s_opt, gammas, grid);
    const double nu_solver = hamiltonian_full(m, p, gamma_solver, grid).argmax[0];

    ExampleSolution s;
    s.example_id = 1;
    s.quantities = {
        quantity("gamma_bar", gbar, gbar, "gamma_P/(gamma_P+gamma_A)"),
        quantity("Z", gbar, hjb.z_opt, "gamma_bar"),
        quantity("Sigma", sigma, hjb.s_opt, "min(1, (2h+gamma_A*gamma_bar)^(-1/2))"),
        quantity("Gamma", gamma, gamma_solver, "-Sigma^(-2)"),
        quantity("nu", nu, nu_solver, "min(1, (2h+gamma_A*gamma_bar)^(-1/4))"),
        quantity("b0", b0, hjb.b.front(), "T/2 * min_S {1/S + (2h+gamma_A*gamma_bar) S}"),
        quantity("principal_value", vp, vp_solver, "-exp(-gamma_P (x0 - U_A^{-1}(R_A) - b(0)))"),
    };
    s.agent_value = reservation;
    s.principal_value = vp;
    s.extras = {{"k", k}, {"U_A_inv_R_A", ua_inv}, {"hjb_integrand_min", hjb.integrand_min}};
    return s;
}

DemandResponseMaps demand_response_maps(const std::vector<double>& sigmas,
                                        const std::vector<double>& lambdas,
                                        const std::vector<double>& mus, double kappa) {
    require(!sigmas.empty() && sigmas.size() == lambdas.size() && sigmas.size() == mus.size(),
            "sigmas, lambdas and mus need equal non-zero length");
    DemandResponseMaps d{sigmas, lambdas, mus, kappa, 0.0, 0.0};
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        positive(sigmas[k], "sigma_k");
        positive(lambdas[k], "lambda_k");
        positive(mus[k], "mu_k");
        d.sigma_bar += sigmas[k] * sigmas[k] / std::sqrt(lambdas[k]);
        d.mu_bar += mus[k];
    }
    return d;
}

std::vector<double> DemandResponseMaps::b_star(double gamma) const {
    require(gamma < 0.0, "b* needs gamma < 0");
    std::vector<double> b;
    for (double l : lambdas) b.push_back(1.0 / std::sqrt(-l * gamma));
    return b;
}

std::vector<double> DemandResponseMaps::a_star(double z) const {
    std::vector<double> a;
    for (double m : mus) a.push_back(std::max(-m * z, 0.0));
    return a;
}

std::vector<double> DemandResponseMaps::b_circ(double S) const {
    require(S >= 0.0, "b° needs S >= 0");
    std::vector<double> b;
    for (double l : lambdas) b.push_back(S / (sigma_bar * std::sqrt(l)));
    return b;
}

double DemandResponseMaps::sigma_of_gamma(double gamma) const {
    require(gamma < 0.0, "S(gamma) needs gamma < 0");
    return sigma_bar / std::sqrt(-gamma);
}

double DemandResponseMaps::gamma_of_sigma(double S) const {
    require(S > 0.0, "gamma(S) needs S > 0");
    return -sigma_bar * sigma_bar / (S * S);
}

double DemandResponseMaps::h_constrained(double x, double z, double S) const {
    require(S > 0.0, "H° needs S > 0");
    const double zm = std::min(z, 0.0);
    return kappa * x + 0.5 * mu_bar * zm * zm - 0.5 * sigma_bar * sigma_bar / S;
}

ExampleSolution example2_closed_form(const std::vector<double>& sigmas,
                                     const std::vector<double>& lambdas,
                                     const std::vector<double>& mus, double kappa) {
    const DemandResponseMaps d = demand_response_maps(sigmas, lambdas, mus, kappa);
    const std::size_t n = sigmas.size();
    ExampleSolution s;
    s.example_id = 2;
    s.agent_value = kNaN;
    s.principal_value = kNaN;

    double s_solver = kNaN, g_solver = kNaN;
    std::vector<double> bc_solver(n, kNaN), bs_solver(n, kNaN), a_solver(n, kNaN);
    if (n <= 2) {
        DemandResponseParams p;
        p.sigmas = sigmas;
        p.lambdas = lambdas;
        p.mus = mus;
        p.kappa = kappa;
        const ModelSpec m = make_demand_response(p);
        std::vector<std::size_t> counts(n, 1);
        counts.resize(2 * n, n == 1 ? 4001 : 801);
        const ControlGrid grid = ControlGrid::for_model(m, counts);
        const StatePoint p0{0.0, 0.0, 0.0, 0.0};
        const auto hf = hamiltonian_full(m, p0, -1.0, grid);
        s_solver = hf.variance;
        for (std::size_t k = 0; k < n; ++k) bs_solver[k] = hf.argmax[n + k];
        g_solver = gamma_from_sigma(m, p0, d.sigma_bar, GammaGrid{}.values(), grid);
        const double tol = default_variance_tolerance(m, p0, grid, d.sigma_bar, d.sigma_bar);
        const auto hc = hamiltonian_constrained(m, p0, d.sigma_bar, grid, tol);
        for (std::size_t k = 0; k < n; ++k) bc_solver[k] = hc.argmax[n + k];

        // drift effort on a fine a-lattice with b pinned at 1
        DemandResponseParams pa = p;
        pa.b_box = {{1.0, 1.0}};
        const ModelSpec ma = make_demand_response(pa);
        std::vector<std::size_t> ca(n, n == 1 ? 4001 : 801);
        ca.resize(2 * n, 1);
        const auto ha = hamiltonian_full(ma, {0.0, 0.0, 0.0, -0.5}, 0.0, ControlGrid::for_model(ma, ca));
        for (std::size_t k = 0; k < n; ++k) a_solver[k] = ha.argmax[k];
    }

    s.quantities.push_back(quantity("sigma_bar", d.sigma_bar, d.sigma_bar, "sum_k sigma_k^2/sqrt(lambda_k)"));
    s.quantities.push_back(quantity("S_of_gamma(-1)", d.sigma_of_gamma(-1.0), s_solver, "sigma_bar/sqrt(-gamma)"));
    s.quantities.push_back(quantity("gamma_of_S(sigma_bar)", d.gamma_of_sigma(d.sigma_bar), g_solver,
                                    "-sigma_bar^2/S^2"));
    const auto bs = d.b_star(-1.0);
    const auto bc = d.b_circ(d.sigma_bar);
    const auto as = d.a_star(-0.5);
    for (std::size_t k = 0; k < n; ++k) {
        const std::string i = std::to_string(k + 1);
        s.quantities.push_back(quantity("b_star_" + i + "(-1)", bs[k], bs_solver[k], "(-lambda_k gamma)^(-1/2)"));
        s.quantities.push_back(quantity("b_circ_" + i + "(sigma_bar)", bc[k], bc_solver[k],
                                        "S/(sigma_bar sqrt(lambda_k))"));
        s.quantities.push_back(quantity("a_star_" + i + "(-0.5)", as[k], a_solver[k], "max(-mu_k z, 0)"));
    }
    s.extras = {{"sigma_bar", d.sigma_bar}, {"mu_bar", d.mu_bar}, {"kappa", kappa},
                {"round_trip_gamma(-4)", d.gamma_of_sigma(d.sigma_of_gamma(-4.0))}};
    return s;
}

ExampleSolution example3_gap(double T, double x0, double y0, std::size_t s_steps,
                             std::size_t gamma_steps) {
    require(std::isfinite(T) && T > 0.0, "T must be > 0");
    require(s_steps >= 3 && gamma_steps >= 3, "s_steps and gamma_steps must be >= 3");
    QuarticParams qp;
    qp.horizon = T;
    qp.x0 = x0;
    qp.reservation = y0;
    const ModelSpec m = make_quartic(qp);

    // first best: max_S {H°(S) - S^3} + 1 = S^2 - S^3
    const auto sg = uniform_grid(0.0, 1.0, s_steps);
    double gain = -std::numeric_limits<double>::infinity(), s_star = 0.0;
    for (double S : sg) {
        const double g = S * S - S * S * S;
        if (g > gain) {
            gain = g;
            s_star = S;
        }
    }

    // restricted: H_A(gamma) - gamma |u*|^2 / 2 - |u*|^6 over the gamma grid
    const ControlGrid grid(m.control_box, {2001});
    const auto gg = uniform_grid(-10.0, 2.0, gamma_steps);
    std::vector<double> obj(gg.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gg.size(); ++i) {
        const auto h = hamiltonian_full(m, {0.0, x0, 0.0, 0.0}, gg[i], grid);
        const double v = h.variance;
        obj[i] = h.value - 0.5 * gg[i] * v - v * v * v;
        best = std::max(best, obj[i]);
    }
    double lo = kNaN, hi = kNaN;
    for (std::size_t i = 0; i < gg.size(); ++i) {
        if (obj[i] < best - 1e-12) continue;
        if (std::isnan(lo)) lo = gg[i];
        hi = gg[i];
    }
    const StatePoint p0{0.0, x0, 0.0, 0.0};
    const double gamma_map = gamma_from_sigma(m, p0, s_star, gg, grid);

    const auto dual = duality_report(m, p0, uniform_grid(0.0, 1.0, 101), GammaGrid{}.values(),
                                     ControlGrid::for_model(m));

    ExampleSolution s;
    s.example_id = 3;
    s.quantities = {
        quantity("first_best_gain", 4.0 / 27.0, gain, "max_S S^2 - S^3"),
        quantity("S_star", 2.0 / 3.0, s_star, "argmax_S S^2 - S^3"),
        quantity("first_best_total", x0 - y0 - 23.0 * T / 27.0, x0 - y0 - T + T * gain, "x0 - y0 - 23T/27"),
        quantity("restricted_value", -1.0, best, "max_gamma H_A(gamma) - gamma S*(gamma)/2 - S*(gamma)^3"),
        quantity("gamma_star", -2.0, gamma_map, "argmin_gamma H_A(gamma) - gamma S/2 at S_star"),
        quantity("restricted_total", x0 - y0 - T, x0 - y0 + T * best, "x0 - y0 - T"),
        quantity("max_gap", 0.25, dual.max_gap, "max_S S - S^2"),
        quantity("witness_S", 0.5, dual.witness_S, "argmax_S S - S^2"),
    };
    s.agent_value = y0;
    s.principal_value = x0 - y0 - T + T * gain;
    s.extras = {{"restricted_gamma_lo", lo}, {"restricted_gamma_hi", hi},
                {"duality_eps_grid", dual.eps_grid}, {"duality_tol_gap", dual.tol_gap},
                {"duality_holds", dual.holds ? 1.0 : 0.0}};
    return s;
}

} // namespace vcontract
