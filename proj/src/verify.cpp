#include "vcontract/verify.hpp"

#include <cmath>

#include "parallel.hpp"
#include "vcontract/error.hpp"

namespace vcontract {

BestResponseReport best_response_check(const ModelSpec& model, const ContractFB& contract,
                                       const std::vector<Deviation>& deviations,
                                       const SimConfig& cfg, const ControlGrid& grid,
                                       double tol_S, double allowance) {
    cfg.validate();
    BestResponseReport rep;
    rep.y0 = contract.y0;
    rep.allowance = allowance >= 0.0 ? allowance : 5.0 * model.horizon / double(cfg.n_steps);

    SimConfig on_cfg = cfg;
    on_cfg.trace_paths = 0;
    const PathEnsemble on = simulate_fb(model, contract, on_cfg, grid, tol_S);
    if (on.n_infeasible > 0) throw NumericalError("on-policy simulation is infeasible for the declared sigma");
    rep.on_policy_value = agent_objective(model, on);

    bool all_ok = true;
    for (std::size_t j = 0; j < deviations.size(); ++j) {
        const Deviation& d = deviations[j];
        require(model.in_box(d.control), "deviation '" + d.description + "' is outside the control box");
        SimConfig dcfg = on_cfg;
        dcfg.stream_offset = cfg.stream_offset + static_cast<std::uint32_t>(j + 1);
        PathEnsemble ens;
        if (d.use_cpt) {
            ContractCPT cpt{contract.y0, contract.z, Policy::constant(d.gamma)};
            ens = simulate_cpt(model, cpt, dcfg, grid, Effort::constant(d.control));
        } else {
            if (contract.sigma.is_constant() && !model.traits.state_dependent && !model.traits.time_dependent) {
                const auto c = eval_coefficients(model, 0.0, model.x0, d.control);
                require(std::abs(c.variance - contract.sigma.constant_value()) <= tol_S,
                        "deviation '" + d.description +
                            "' does not meet the contract variance; evaluate it under the CPT form");
            }
            ens = simulate_fb(model, contract, dcfg, grid, tol_S, Effort::constant(d.control));
        }
        DeviationResult r;
        r.deviation = d;
        r.value = agent_objective(model, ens);
        r.pooled_std_error = pooled_std_error(rep.on_policy_value, r.value);
        r.ok = r.value.mean <= rep.on_policy_value.mean + 3.0 * r.pooled_std_error;
        all_ok = all_ok && r.ok;
        rep.deviation_values.push_back(std::move(r));
    }
    rep.value_matches_y0 = std::abs(rep.on_policy_value.mean - contract.y0) <=
                           3.0 * rep.on_policy_value.std_error + rep.allowance;
    rep.pass = all_ok && rep.value_matches_y0;
    return rep;
}

namespace {

ScanOptimum best_of(const std::vector<ScanCell>& cells) {
    ScanOptimum best;
    bool any = false;
    for (const auto& c : cells) {
        if (!c.feasible) continue;
        if (!any || c.value.mean > best.value.mean) {
            best = {c.z, c.param, c.value};
            any = true;
        }
    }
    if (!any) throw NumericalError("no feasible cell in the scan");
    return best;
}

double neighbour_spacing(const std::vector<double>& g, double v) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] != v) continue;
        if (i > 0) s = std::max(s, g[i] - g[i - 1]);
        if (i + 1 < g.size()) s = std::max(s, g[i + 1] - g[i]);
    }
    return s;
}

} // namespace

EquivalenceReport equivalence_scan(const ModelSpec& model, const std::vector<double>& z_grid,
                                   const std::vector<double>& gamma_grid,
                                   const std::vector<double>& s_grid, const SimConfig& cfg,
                                   const ControlGrid& grid, double tol_S) {
    require(!z_grid.empty() && !gamma_grid.empty() && !s_grid.empty(), "scan grids must be non-empty");
    require(tol_S > 0.0, "tol_S must be > 0");
    cfg.validate();
    const double y0 = model.reservation;
    const std::size_t nz = z_grid.size(), ng = gamma_grid.size(), ns = s_grid.size();
    EquivalenceReport rep;
    rep.cpt_surface.resize(nz * ng);
    rep.fb_surface.resize(nz * ns);

    SimConfig scfg = cfg;
    scfg.trace_paths = 0;
    const bool fast = ConstantPolicyEvaluator::eligible(model);
    rep.used_fast_path = fast;
    std::unique_ptr<ConstantPolicyEvaluator> eval;
    if (fast) eval = std::make_unique<ConstantPolicyEvaluator>(model, scfg);

    // state-free models: loadings do not depend on the state, so evaluate at (0, x0, 0)
    auto cpt_cell = [&](unsigned, std::size_t idx) {
        const double z = z_grid[idx / ng], g = gamma_grid[idx % ng];
        ScanCell& cell = rep.cpt_surface[idx];
        cell.z = z;
        cell.param = g;
        if (fast) {
            const StatePoint p{0.0, model.x0, 0.0, z};
            const auto h = hamiltonian_full(model, p, g, grid);
            CoefficientEval c;
            c.noise_dim = model.noise_dim;
            model.evaluate(0.0, model.x0, h.argmax.data(), c);
            const double hv = detail::reward(c, p, g, 0.0);
            cell.value = eval->principal_objective(ContractForm::cpt, y0, z, g, hv, h.argmax.data());
        } else {
            SimConfig one = scfg;
            one.workers = 1;
            const ContractCPT k{y0, Policy::constant(z), Policy::constant(g)};
            cell.value = principal_objective(model, simulate_cpt(model, k, one, grid));
        }
    };
    auto fb_cell = [&](unsigned, std::size_t idx) {
        const double z = z_grid[idx / ns], S = s_grid[idx % ns];
        ScanCell& cell = rep.fb_surface[idx];
        cell.z = z;
        cell.param = S;
        if (fast) {
            const StatePoint p{0.0, model.x0, 0.0, z};
            const auto h = hamiltonian_constrained(model, p, S, grid, tol_S);
            if (!h.feasible) {
                cell.feasible = false;
                return;
            }
            CoefficientEval c;
            c.noise_dim = model.noise_dim;
            model.evaluate(0.0, model.x0, h.argmax.data(), c);
            const double hv = detail::reward(c, p, 0.0, 0.0);
            cell.value = eval->principal_objective(ContractForm::fb, y0, z, 0.0, hv, h.argmax.data());
        } else {
            SimConfig one = scfg;
            one.workers = 1;
            const ContractFB k{y0, Policy::constant(z), Policy::constant(S)};
            const PathEnsemble ens = simulate_fb(model, k, one, grid, tol_S);
            if (ens.n_infeasible == ens.terminal.size()) {
                cell.feasible = false;
                return;
            }
            cell.value = principal_objective(model, ens);
        }
    };
    detail::parallel_for(cfg.workers, nz * ng, cpt_cell);
    detail::parallel_for(cfg.workers, nz * ns, fb_cell);

    rep.best_cpt = best_of(rep.cpt_surface);
    rep.best_fb = best_of(rep.fb_surface);
    rep.value_gap = std::abs(rep.best_cpt.value.mean - rep.best_fb.value.mean);
    rep.pooled_std_error = pooled_std_error(rep.best_cpt.value, rep.best_fb.value);
    const StatePoint p{0.0, model.x0, 0.0, rep.best_cpt.z};
    rep.sigma_of_best_gamma = sigma_from_gamma(model, p, rep.best_cpt.param, grid);
    const double tol = std::max(neighbour_spacing(s_grid, rep.best_fb.param), tol_S);
    rep.corresponding = std::abs(rep.sigma_of_best_gamma - rep.best_fb.param) <= tol;
    return rep;
}

} // namespace vcontract
