/* C interface to the volatility-contract toolkit. */
#ifndef VCONTRACT_H
#define VCONTRACT_H

#include <stddef.h>
#include <stdint.h>

#if defined(VC_BUILDING_LIBRARY)
#define VC_API __attribute__((visibility("default")))
#else
#define VC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vc_status {
    VC_OK = 0,
    VC_ERR_VALIDATION = 1,
    VC_ERR_NUMERICAL = 2,
    VC_ERR_INTERNAL = 3
} vc_status;

typedef struct vc_model vc_model;
typedef struct vc_grid vc_grid;
typedef struct vc_ensemble vc_ensemble;

#define VC_MAX_CONTROLS 16
#define VC_MAX_NOISE 8

typedef struct vc_state {
    double t, x, y, z;
} vc_state;

typedef struct vc_coefficients {
    double drift;
    double diffusion[VC_MAX_NOISE];
    int noise_dim;
    double variance;
    double cost;
    double k_a;
} vc_coefficients;

typedef struct vc_hamiltonian {
    double value;
    double variance;
    double constraint_residual;
    int feasible;
    size_t control_dim;
    double argmax[VC_MAX_CONTROLS];
} vc_hamiltonian;

typedef struct vc_gamma_grid {
    double lo, hi;
    size_t count;
} vc_gamma_grid;

typedef struct vc_duality_options {
    vc_gamma_grid gamma;
    double tol_S;   /* <= 0: default band */
    double tol_gap; /* <= 0: 5 * eps_grid */
} vc_duality_options;

typedef struct vc_sim_config {
    size_t n_paths;
    size_t n_steps;
    uint64_t seed;
    size_t qv_window;
    unsigned workers;
    size_t trace_paths;
    int model_qv; /* nonzero: use sigma^2 dt instead of squared increments */
} vc_sim_config;

typedef enum vc_form { VC_FORM_CPT = 0, VC_FORM_FB = 1 } vc_form;

typedef struct vc_contract {
    vc_form form;
    double y0;
    double z;
    double gamma; /* CPT */
    double sigma; /* FB: quadratic-variation density */
} vc_contract;

typedef struct vc_deviation {
    size_t control_dim;
    double control[VC_MAX_CONTROLS];
    int use_cpt;
    double gamma;
} vc_deviation;

/* Message of the last failed call on this thread. */
VC_API const char* vc_last_error(void);
VC_API const char* vc_version(void);
VC_API void vc_string_free(char* s);

VC_API vc_status vc_model_from_json(const char* json, vc_model** out);
VC_API vc_status vc_model_from_file(const char* path, vc_model** out);
VC_API void vc_model_free(vc_model* m);
VC_API vc_status vc_model_describe(const vc_model* m, char** json_out);
VC_API size_t vc_model_control_dim(const vc_model* m);
VC_API double vc_model_horizon(const vc_model* m);
VC_API double vc_model_reservation(const vc_model* m);

VC_API vc_status vc_grid_default(const vc_model* m, vc_grid** out);
VC_API vc_status vc_grid_create(const vc_model* m, const size_t* counts, size_t n_axes, vc_grid** out);
VC_API void vc_grid_free(vc_grid* g);
VC_API size_t vc_grid_size(const vc_grid* g);

/* Smallest and largest lattice variance at (t, x). */
VC_API vc_status vc_variance_range(const vc_model* m, const vc_grid* g, double t, double x, double* lo,
                                   double* hi);

VC_API vc_status vc_eval_coefficients(const vc_model* m, double t, double x, const double* u,
                                      size_t n_u, vc_coefficients* out);

VC_API void vc_gamma_grid_default(vc_gamma_grid* g);

VC_API vc_status vc_hamiltonian_full(const vc_model* m, const vc_grid* g, vc_state p, double gamma,
                                     vc_hamiltonian* out);
/* tol_S <= 0 selects the default band around S */
VC_API vc_status vc_hamiltonian_constrained(const vc_model* m, const vc_grid* g, vc_state p, double S,
                                            double tol_S, vc_hamiltonian* out);
VC_API vc_status vc_conjugate_from_constrained(const vc_model* m, const vc_grid* g, vc_state p,
                                               double gamma, const double* s_grid, size_t n_s,
                                               double tol_S, double* out);
VC_API vc_status vc_biconjugate(const vc_model* m, const vc_grid* g, vc_state p, double S,
                                const vc_gamma_grid* gammas, double* value, double* gamma_star);
VC_API vc_status vc_sigma_from_gamma(const vc_model* m, const vc_grid* g, vc_state p, double gamma,
                                     double* out);
VC_API vc_status vc_gamma_from_sigma(const vc_model* m, const vc_grid* g, vc_state p, double S,
                                     const vc_gamma_grid* gammas, double* out);

/* Writes the report as JSON and as CSV (S,H_constrained,biconjugate,gap,gamma_star). */
VC_API vc_status vc_duality_report(const vc_model* m, const vc_grid* g, vc_state p,
                                   const double* s_grid, size_t n_s, const vc_duality_options* opts,
                                   char** json_out, char** csv_out);

VC_API void vc_sim_config_default(vc_sim_config* cfg);
/* fixed_effort may be NULL (agent plays the maximiser); tol_S <= 0 selects the default band */
VC_API vc_status vc_simulate(const vc_model* m, const vc_grid* g, const vc_contract* c,
                             const vc_sim_config* cfg, double tol_S, const double* fixed_effort,
                             vc_ensemble** out);
VC_API void vc_ensemble_free(vc_ensemble* e);
VC_API vc_status vc_ensemble_summary(const vc_model* m, const vc_ensemble* e, char** json_out);
VC_API vc_status vc_ensemble_traces_csv(const vc_ensemble* e, char** csv_out);
VC_API vc_status vc_ensemble_objectives(const vc_model* m, const vc_ensemble* e, double* agent_mean,
                                        double* agent_se, double* principal_mean, double* principal_se);
/* Fills up to cap estimates; n_out receives the series length. */
VC_API vc_status vc_realized_qv(const vc_ensemble* e, size_t path, size_t window, double* out,
                                size_t cap, size_t* n_out);

VC_API vc_status vc_best_response(const vc_model* m, const vc_grid* g, double y0, double z, double sigma,
                                  const vc_deviation* devs, size_t n_dev, const vc_sim_config* cfg,
                                  double tol_S, char** json_out);

VC_API vc_status vc_equivalence_scan(const vc_model* m, const vc_grid* g, const double* z_grid, size_t n_z,
                                     const double* gamma_grid, size_t n_gamma, const double* s_grid,
                                     size_t n_s, const vc_sim_config* cfg, double tol_S,
                                     char** json_out, char** cpt_csv, char** fb_csv);

VC_API vc_status vc_example1(double gamma_a, double gamma_p, double h, double T, double x0,
                             double reservation, char** json_out);
VC_API vc_status vc_example2(const double* sigmas, const double* lambdas, const double* mus, size_t d,
                             double kappa, char** json_out);
VC_API vc_status vc_example3(double T, double x0, double y0, size_t s_steps, size_t gamma_steps,
                             char** json_out);

VC_API vc_status vc_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif
