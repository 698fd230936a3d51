#pragma once

#include <map>
#include <string>
#include <vector>

#include "vcontract/config.hpp"
#include "vcontract/duality.hpp"
#include "vcontract/simulate.hpp"

namespace vcontract {

struct Deviation {
    std::string description;
    std::vector<double> control;
    // evaluate under the CPT form with this Gamma instead of the FB contract
    bool use_cpt = false;
    double gamma = 0.0;
};

struct DeviationResult {
    Deviation deviation;
    MCEstimate value;
    double pooled_std_error = 0.0;
    bool ok = false;
};

struct BestResponseReport {
    MCEstimate on_policy_value;
    std::vector<DeviationResult> deviation_values;
    double y0 = 0.0;
    double allowance = 0.0;
    bool value_matches_y0 = false;
    bool pass = false;
};

// allowance < 0 selects the default 5*dt
BestResponseReport best_response_check(const ModelSpec& model, const ContractFB& contract,
                                       const std::vector<Deviation>& deviations,
                                       const SimConfig& cfg, const ControlGrid& grid,
                                       double tol_S, double allowance = -1.0);

struct ScanCell {
    double z = 0.0;
    double param = 0.0; // gamma or S
    MCEstimate value;
    bool feasible = true;
};

struct ScanOptimum {
    double z = 0.0;
    double param = 0.0;
    MCEstimate value;
};

struct EquivalenceReport {
    ScanOptimum best_cpt;
    ScanOptimum best_fb;
    double value_gap = 0.0;
    double pooled_std_error = 0.0;
    double sigma_of_best_gamma = 0.0;
    bool corresponding = false;
    bool used_fast_path = false;
    std::vector<ScanCell> cpt_surface;
    std::vector<ScanCell> fb_surface;
};

EquivalenceReport equivalence_scan(const ModelSpec& model, const std::vector<double>& z_grid,
                                   const std::vector<double>& gamma_grid,
                                   const std::vector<double>& s_grid, const SimConfig& cfg,
                                   const ControlGrid& grid, double tol_S);

struct SolutionQuantity {
    std::string name;
    double closed_form = 0.0;
    double solver = 0.0;
    double abs_error = 0.0;
    std::string formula;
};

struct ExampleSolution {
    int example_id = 0;
    std::vector<SolutionQuantity> quantities;
    double agent_value = 0.0;
    double principal_value = 0.0;
    std::map<std::string, double> extras;

    const SolutionQuantity& get(const std::string& name) const;
};

struct HjbSolution {
    std::vector<double> time;
    std::vector<double> b;
    double z_opt = 0.0;
    double s_opt = 0.0;
    double integrand_min = 0.0;
};

// b is the certainty-equivalent cost still to be paid: b(T) = 0, b' = -min/2.
HjbSolution example1_hjb_ode(double gamma_a, double gamma_p, double h, double T,
                             std::size_t n_steps, const std::vector<double>& z_grid,
                             const std::vector<double>& s_grid);

ExampleSolution example1_closed_form(double gamma_a, double gamma_p, double h, double T,
                                     double x0, double reservation);

struct DemandResponseMaps {
    std::vector<double> sigmas, lambdas, mus;
    double kappa = 0.0;
    double sigma_bar = 0.0;
    double mu_bar = 0.0;

    std::vector<double> b_star(double gamma) const;
    std::vector<double> a_star(double z) const;
    std::vector<double> b_circ(double S) const;
    double sigma_of_gamma(double gamma) const;
    double gamma_of_sigma(double S) const;
    double h_constrained(double x, double z, double S) const;
};

DemandResponseMaps demand_response_maps(const std::vector<double>& sigmas,
                                        const std::vector<double>& lambdas,
                                        const std::vector<double>& mus, double kappa);

ExampleSolution example2_closed_form(const std::vector<double>& sigmas,
                                     const std::vector<double>& lambdas,
                                     const std::vector<double>& mus, double kappa);

ExampleSolution example3_gap(double T, double x0, double y0, std::size_t s_steps,
                             std::size_t gamma_steps);

} // namespace vcontract
