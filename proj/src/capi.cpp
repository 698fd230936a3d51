#include "vcontract/vcontract.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "vcontract/config.hpp"
#include "vcontract/error.hpp"
#include "vcontract/report_io.hpp"
#include "vcontract/verify.hpp"

using namespace vcontract;

struct vc_model {
    ModelSpec spec;
};

struct vc_grid {
    ControlGrid grid;
};

struct vc_ensemble {
    PathEnsemble ens;
};

namespace {

thread_local std::string g_last_error;

template <class F>
vc_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return VC_OK;
    } catch (const ValidationError& e) {
        g_last_error = e.what();
        return VC_ERR_VALIDATION;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return VC_ERR_VALIDATION;
    } catch (const NumericalError& e) {
        g_last_error = e.what();
        return VC_ERR_NUMERICAL;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return VC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return VC_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return VC_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void set_string(char** dst, const std::string& s) {
    if (dst) *dst = dup_string(s);
}

void need(const void* p, const char* what) {
    require(p != nullptr, std::string(what) + " must not be null");
}

StatePoint to_state(vc_state p) { return {p.t, p.x, p.y, p.z}; }

std::vector<double> gamma_values(const vc_gamma_grid* g) {
    GammaGrid grid;
    if (g) {
        require(g->count >= 2 && g->lo < g->hi, "gamma grid needs count >= 2 and lo < hi");
        grid.lo = g->lo;
        grid.hi = g->hi;
        grid.count = g->count;
    }
    return grid.values();
}

SimConfig to_sim_config(const vc_sim_config* c) {
    SimConfig cfg;
    if (c) {
        cfg.n_paths = c->n_paths;
        cfg.n_steps = c->n_steps;
        cfg.master_seed = c->seed;
        cfg.qv_window = c->qv_window;
        cfg.workers = c->workers;
        cfg.trace_paths = c->trace_paths;
        cfg.qv_source = c->model_qv ? QvSource::model : QvSource::realized;
    }
    cfg.validate();
    return cfg;
}

// tol_S for a variance target when the caller passed <= 0
double band(const ModelSpec& m, const ControlGrid& g, double t, double x, double s_lo, double s_hi,
            double tol_S) {
    if (tol_S > 0.0) return tol_S;
    return default_variance_tolerance(m, {t, x, 0.0, 0.0}, g, s_lo, s_hi);
}

void fill(const HamiltonianEval& h, vc_hamiltonian* out) {
    out->value = h.value;
    out->variance = h.variance;
    out->constraint_residual = h.constraint_residual;
    out->feasible = h.feasible ? 1 : 0;
    out->control_dim = std::min<std::size_t>(h.argmax.size(), VC_MAX_CONTROLS);
    for (std::size_t i = 0; i < VC_MAX_CONTROLS; ++i)
        out->argmax[i] = i < out->control_dim ? h.argmax[i] : 0.0;
}

} // namespace

extern "C" {

const char* vc_last_error(void) { return g_last_error.c_str(); }

const char* vc_version(void) { return "1.0.0"; }

void vc_string_free(char* s) { std::free(s); }

vc_status vc_model_from_json(const char* json, vc_model** out) {
    return guarded([&] {
        need(json, "json");
        need(out, "out");
        *out = new vc_model{build_model(json)};
    });
}

vc_status vc_model_from_file(const char* path, vc_model** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new vc_model{build_model_file(path)};
    });
}

void vc_model_free(vc_model* m) { delete m; }

vc_status vc_model_describe(const vc_model* m, char** json_out) {
    return guarded([&] {
        need(m, "model");
        set_string(json_out, to_json(m->spec).dump(2));
    });
}

size_t vc_model_control_dim(const vc_model* m) { return m ? m->spec.control_dim() : 0; }

double vc_model_horizon(const vc_model* m) { return m ? m->spec.horizon : 0.0; }

double vc_model_reservation(const vc_model* m) { return m ? m->spec.reservation : 0.0; }

vc_status vc_grid_default(const vc_model* m, vc_grid** out) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        *out = new vc_grid{ControlGrid::for_model(m->spec)};
    });
}

vc_status vc_grid_create(const vc_model* m, const size_t* counts, size_t n_axes, vc_grid** out) {
    return guarded([&] {
        need(m, "model");
        need(counts, "counts");
        need(out, "out");
        std::vector<std::size_t> c(counts, counts + n_axes);
        *out = new vc_grid{ControlGrid::for_model(m->spec, c)};
    });
}

void vc_grid_free(vc_grid* g) { delete g; }

size_t vc_grid_size(const vc_grid* g) { return g ? g->grid.size() : 0; }

vc_status vc_variance_range(const vc_model* m, const vc_grid* g, double t, double x, double* lo,
                            double* hi) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        const auto set = achievable_variance_set(m->spec, t, x, g->grid);
        require(!set.empty(), "control grid is empty");
        if (lo) *lo = set.front().variance;
        if (hi) *hi = set.back().variance;
    });
}

vc_status vc_eval_coefficients(const vc_model* m, double t, double x, const double* u, size_t n_u,
                               vc_coefficients* out) {
    return guarded([&] {
        need(m, "model");
        need(u, "u");
        need(out, "out");
        CoefficientEval c = eval_coefficients(m->spec, t, x, {u, n_u});
        out->drift = c.drift;
        out->noise_dim = c.noise_dim;
        for (int i = 0; i < VC_MAX_NOISE; ++i) out->diffusion[i] = c.diffusion[i];
        out->variance = c.variance;
        out->cost = c.cost;
        out->k_a = c.k_a;
    });
}

void vc_gamma_grid_default(vc_gamma_grid* g) {
    if (!g) return;
    GammaGrid d;
    g->lo = d.lo;
    g->hi = d.hi;
    g->count = d.count;
}

vc_status vc_hamiltonian_full(const vc_model* m, const vc_grid* g, vc_state p, double gamma,
                              vc_hamiltonian* out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(out, "out");
        fill(hamiltonian_full(m->spec, to_state(p), gamma, g->grid), out);
    });
}

vc_status vc_hamiltonian_constrained(const vc_model* m, const vc_grid* g, vc_state p, double S,
                                     double tol_S, vc_hamiltonian* out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(out, "out");
        const double tol = band(m->spec, g->grid, p.t, p.x, S, S, tol_S);
        fill(hamiltonian_constrained(m->spec, to_state(p), S, g->grid, tol), out);
    });
}

vc_status vc_conjugate_from_constrained(const vc_model* m, const vc_grid* g, vc_state p, double gamma,
                                        const double* s_grid, size_t n_s, double tol_S, double* out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(s_grid, "s_grid");
        need(out, "out");
        require(n_s >= 1, "s_grid must not be empty");
        const auto [lo, hi] = std::minmax_element(s_grid, s_grid + n_s);
        const double tol = band(m->spec, g->grid, p.t, p.x, *lo, *hi, tol_S);
        *out = conjugate_from_constrained(m->spec, to_state(p), gamma, {s_grid, n_s}, g->grid, tol);
    });
}

vc_status vc_biconjugate(const vc_model* m, const vc_grid* g, vc_state p, double S,
                         const vc_gamma_grid* gammas, double* value, double* gamma_star) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        const auto gv = gamma_values(gammas);
        const auto r = biconjugate(m->spec, to_state(p), S, gv, g->grid);
        if (value) *value = r.value;
        if (gamma_star) *gamma_star = r.gamma_star;
    });
}

vc_status vc_sigma_from_gamma(const vc_model* m, const vc_grid* g, vc_state p, double gamma,
                              double* out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(out, "out");
        *out = sigma_from_gamma(m->spec, to_state(p), gamma, g->grid);
    });
}

vc_status vc_gamma_from_sigma(const vc_model* m, const vc_grid* g, vc_state p, double S,
                              const vc_gamma_grid* gammas, double* out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(out, "out");
        const auto gv = gamma_values(gammas);
        *out = gamma_from_sigma(m->spec, to_state(p), S, gv, g->grid);
    });
}

vc_status vc_duality_report(const vc_model* m, const vc_grid* g, vc_state p, const double* s_grid,
                            size_t n_s, const vc_duality_options* opts, char** json_out,
                            char** csv_out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(s_grid, "s_grid");
        std::vector<double> s(s_grid, s_grid + n_s);
        std::vector<double> gv = gamma_values(opts ? &opts->gamma : nullptr);
        DualityOptions o;
        if (opts && opts->tol_S > 0.0) o.tol_S = opts->tol_S;
        if (opts && opts->tol_gap > 0.0) o.tol_gap = opts->tol_gap;
        const DualityReport r = duality_report(m->spec, to_state(p), s, gv, g->grid, o);
        std::string json = to_json(r).dump(2);
        std::string csv = duality_csv(r);
        set_string(json_out, json);
        try {
            set_string(csv_out, csv);
        } catch (...) {
            if (json_out) std::free(*json_out);
            throw;
        }
    });
}

void vc_sim_config_default(vc_sim_config* cfg) {
    if (!cfg) return;
    SimConfig d;
    cfg->n_paths = d.n_paths;
    cfg->n_steps = d.n_steps;
    cfg->seed = d.master_seed;
    cfg->qv_window = d.qv_window;
    cfg->workers = d.workers;
    cfg->trace_paths = d.trace_paths;
    cfg->model_qv = 0;
}

vc_status vc_simulate(const vc_model* m, const vc_grid* g, const vc_contract* c,
                      const vc_sim_config* cfg, double tol_S, const double* fixed_effort,
                      vc_ensemble** out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(c, "contract");
        need(out, "out");
        const SimConfig sc = to_sim_config(cfg);
        Effort effort = Effort::optimal();
        if (fixed_effort)
            effort = Effort::constant(
                std::vector<double>(fixed_effort, fixed_effort + m->spec.control_dim()));
        PathEnsemble ens;
        if (c->form == VC_FORM_CPT) {
            ContractCPT k{c->y0, Policy::constant(c->z), Policy::constant(c->gamma)};
            ens = simulate_cpt(m->spec, k, sc, g->grid, effort);
        } else if (c->form == VC_FORM_FB) {
            require(c->sigma >= 0.0, "sigma must be >= 0");
            ContractFB k{c->y0, Policy::constant(c->z), Policy::constant(c->sigma)};
            const double tol = band(m->spec, g->grid, 0.0, m->spec.x0, c->sigma, c->sigma, tol_S);
            ens = simulate_fb(m->spec, k, sc, g->grid, tol, effort);
        } else {
            throw ValidationError("unknown contract form");
        }
        *out = new vc_ensemble{std::move(ens)};
    });
}

void vc_ensemble_free(vc_ensemble* e) { delete e; }

vc_status vc_ensemble_summary(const vc_model* m, const vc_ensemble* e, char** json_out) {
    return guarded([&] {
        need(m, "model");
        need(e, "ensemble");
        set_string(json_out, summary_json(m->spec, e->ens).dump(2));
    });
}

vc_status vc_ensemble_traces_csv(const vc_ensemble* e, char** csv_out) {
    return guarded([&] {
        need(e, "ensemble");
        set_string(csv_out, traces_csv(e->ens));
    });
}

vc_status vc_ensemble_objectives(const vc_model* m, const vc_ensemble* e, double* agent_mean,
                                 double* agent_se, double* principal_mean, double* principal_se) {
    return guarded([&] {
        need(m, "model");
        need(e, "ensemble");
        const MCEstimate a = agent_objective(m->spec, e->ens);
        const MCEstimate p = principal_objective(m->spec, e->ens);
        if (agent_mean) *agent_mean = a.mean;
        if (agent_se) *agent_se = a.std_error;
        if (principal_mean) *principal_mean = p.mean;
        if (principal_se) *principal_se = p.std_error;
    });
}

vc_status vc_realized_qv(const vc_ensemble* e, size_t path, size_t window, double* out, size_t cap,
                         size_t* n_out) {
    return guarded([&] {
        need(e, "ensemble");
        const QvSeries s = realized_qv_density(e->ens, path, window);
        if (n_out) *n_out = s.estimate.size();
        if (out)
            std::copy_n(s.estimate.begin(), std::min(cap, s.estimate.size()), out);
    });
}

vc_status vc_best_response(const vc_model* m, const vc_grid* g, double y0, double z, double sigma,
                           const vc_deviation* devs, size_t n_dev, const vc_sim_config* cfg,
                           double tol_S, char** json_out) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        require(n_dev == 0 || devs != nullptr, "deviations must not be null");
        require(sigma >= 0.0, "sigma must be >= 0");
        const SimConfig sc = to_sim_config(cfg);
        std::vector<Deviation> dv;
        for (size_t j = 0; j < n_dev; ++j) {
            require(devs[j].control_dim == m->spec.control_dim(),
                    "deviation control dimension does not match the model");
            Deviation d;
            d.control.assign(devs[j].control, devs[j].control + devs[j].control_dim);
            d.use_cpt = devs[j].use_cpt != 0;
            d.gamma = devs[j].gamma;
            d.description = "deviation " + std::to_string(j);
            dv.push_back(std::move(d));
        }
        const double tol = band(m->spec, g->grid, 0.0, m->spec.x0, sigma, sigma, tol_S);
        ContractFB k{y0, Policy::constant(z), Policy::constant(sigma)};
        const BestResponseReport r = best_response_check(m->spec, k, dv, sc, g->grid, tol);
        set_string(json_out, to_json(r).dump(2));
    });
}

vc_status vc_equivalence_scan(const vc_model* m, const vc_grid* g, const double* z_grid, size_t n_z,
                              const double* gamma_grid, size_t n_gamma, const double* s_grid,
                              size_t n_s, const vc_sim_config* cfg, double tol_S, char** json_out,
                              char** cpt_csv, char** fb_csv) {
    return guarded([&] {
        need(m, "model");
        need(g, "grid");
        need(z_grid, "z_grid");
        need(gamma_grid, "gamma_grid");
        need(s_grid, "s_grid");
        require(n_z > 0 && n_gamma > 0 && n_s > 0, "scan grids must not be empty");
        const SimConfig sc = to_sim_config(cfg);
        std::vector<double> z(z_grid, z_grid + n_z), gm(gamma_grid, gamma_grid + n_gamma),
            s(s_grid, s_grid + n_s);
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        const double tol = band(m->spec, g->grid, 0.0, m->spec.x0, *lo, *hi, tol_S);
        const EquivalenceReport r = equivalence_scan(m->spec, z, gm, s, sc, g->grid, tol);
        std::string j = to_json(r).dump(2);
        std::string a = surface_csv(r.cpt_surface, "gamma");
        std::string b = surface_csv(r.fb_surface, "S");
        char* pj = nullptr;
        char* pa = nullptr;
        char* pb = nullptr;
        try {
            if (json_out) pj = dup_string(j);
            if (cpt_csv) pa = dup_string(a);
            if (fb_csv) pb = dup_string(b);
        } catch (...) {
            std::free(pj);
            std::free(pa);
            throw;
        }
        if (json_out) *json_out = pj;
        if (cpt_csv) *cpt_csv = pa;
        if (fb_csv) *fb_csv = pb;
    });
}

vc_status vc_example1(double gamma_a, double gamma_p, double h, double T, double x0,
                      double reservation, char** json_out) {
    return guarded([&] {
        const auto s = example1_closed_form(gamma_a, gamma_p, h, T, x0, reservation);
        set_string(json_out, to_json(s).dump(2));
    });
}

vc_status vc_example2(const double* sigmas, const double* lambdas, const double* mus, size_t d,
                      double kappa, char** json_out) {
    return guarded([&] {
        need(sigmas, "sigmas");
        need(lambdas, "lambdas");
        need(mus, "mus");
        const auto s = example2_closed_form({sigmas, sigmas + d}, {lambdas, lambdas + d},
                                            {mus, mus + d}, kappa);
        set_string(json_out, to_json(s).dump(2));
    });
}

vc_status vc_example3(double T, double x0, double y0, size_t s_steps, size_t gamma_steps,
                      char** json_out) {
    return guarded([&] {
        const auto s = example3_gap(T, x0, y0, s_steps, gamma_steps);
        set_string(json_out, to_json(s).dump(2));
    });
}

vc_status vc_write_file(const char* path, const char* text) {
    return guarded([&] {
        need(path, "path");
        need(text, "text");
        write_text(path, text);
    });
}

} // extern "C"
