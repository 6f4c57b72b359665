#include "topo/levelset.hpp"

#include <cmath>

#include "run_common.hpp"
#include "topo/convergence.hpp"
#include "topo/sensitivity.hpp"
#include "topo/vartop.hpp"

namespace topo {

Eigen::VectorXd hj_update(const Eigen::VectorXd& phi,
                          const Eigen::VectorXd& sens_nodal, double lambda,
                          double s, double C0, double dt, double kappa,
                          const NodalLaplacian& reg) {
  if (phi.size() != sens_nodal.size())
    throw InvalidArgument("hj_update field size mismatch");
  const double drive = lambda + s * C0;
  Eigen::VectorXd out =
      (phi.array() + dt * kappa * (sens_nodal.array() - drive))
          .cwiseMin(1.0)
          .cwiseMax(-1.0);
  if (!out.allFinite()) throw InvalidState("non-finite level-set update");
  out = reg.regularize_nodal(out);
  return out.cwiseMin(1.0).cwiseMax(-1.0);
}

RunRecord run_levelset(const Grid& grid, const ProblemSpec& prob,
                       const MethodConfig& cfg) {
  RunRecord rec;
  rec.method = Method::Levelset;
  const double alpha = prob.material.alpha;
  const double beta = std::pow(alpha, 1.0 / cfg.m_exp);
  const double fbar = prob.target_fraction;
  const double t_void = 1.0 - fbar;
  const auto acct = detail::VolumeAccounting::build(grid, prob.masks);

  SolverOptions sopts;
  sopts.rel_tol = cfg.solver_rel_tol;
  StateEvaluator eval(grid, prob, sopts);
  NodalLaplacian reg(grid, cfg.tau);
  NodalLaplacian crit_reg(grid, cfg.tau_criterion);

  Eigen::VectorXd phi = Eigen::VectorXd::Ones(grid.node_count());
  ShiftNormState norm_state;
  double lambda = 0.0;

  auto masked_fractions = [&](const Eigen::VectorXd& f_nodal) {
    Eigen::VectorXd frac = element_stiff_fractions(f_nodal, grid);
    if (!prob.masks.elem_state.empty()) {
      for (std::size_t e = 0; e < prob.masks.elem_state.size(); ++e) {
        if (prob.masks.elem_state[e] == ElemState::PassiveVoid)
          frac[e] = 0.0;
        else if (prob.masks.elem_state[e] == ElemState::PassiveSolid)
          frac[e] = 1.0;
      }
    }
    return frac;
  };

  Eigen::VectorXd fractions = masked_fractions(phi);
  Eigen::VectorXd chi = beta + (1.0 - beta) * fractions.array();

  const double J0 = detail::reference_objective(eval, grid, prob);
  rec.J0 = J0;
  const double J0n = detail::j0_norm(J0);
  detail::push_record(rec, 0, 0, J0, J0, 1.0, detail::nan_marker(),
                      detail::nan_marker(), 0.0);

  std::vector<double> stepJ{J0};
  bool converged = false;
  bool volume_seen_ok = false;

  try {
    for (int iter = 1; iter <= cfg.max_iters && !converged; ++iter) {
      const Eigen::VectorXd scale =
          fractions.array() + (1.0 - fractions.array()) * alpha;
      eval.solve_cases(scale);
      const double J = eval.objective();

      Eigen::VectorXd xi = vartop_pseudo_energy(eval, chi, cfg.m_exp, beta);
      if (!norm_state.frozen) norm_state.freeze_from(xi);
      const Eigen::VectorXd xi_hat = shift_normalize(xi, chi, norm_state);
      const Eigen::VectorXd xi_nodal = element_to_node_average(grid, xi_hat);

      double stiff = acct.passive_solid;
      for (int e : acct.active) stiff += fractions[e] * grid.elem_volume();
      const double C0 = t_void - (1.0 - stiff / acct.denom);

      Eigen::VectorXd phi_new = hj_update(phi, xi_nodal, lambda, cfg.s_penalty,
                                          C0, cfg.dt, cfg.kappa, reg);
      lambda += cfg.s_penalty * C0;

      Eigen::VectorXd frac_new = masked_fractions(phi_new);
      Eigen::VectorXd chi_new = beta + (1.0 - beta) * frac_new.array();

      stepJ.push_back(J);
      const auto dJc = objective_criterion(stepJ, cfg.window, J0n);
      const double dtopo = topology_criterion(chi, chi_new, grid,
                                              TopologyMode::Nodal, &crit_reg);
      double stiff_new = acct.passive_solid;
      for (int e : acct.active) stiff_new += frac_new[e] * grid.elem_volume();
      const double vol = stiff_new / acct.denom;
      detail::push_record(rec, iter, 1, J, J0, vol,
                          dJc ? *dJc : detail::nan_marker(), dtopo, lambda);

      phi = phi_new;
      fractions = frac_new;
      chi = chi_new;

      const bool vol_ok = std::abs(vol - fbar) <= cfg.tol_volume;
      volume_seen_ok = volume_seen_ok || vol_ok;
      const bool J_ok = !cfg.use_objective_criterion || (dJc && *dJc <= cfg.tol_J);
      converged = vol_ok && J_ok && dJc.has_value() && dtopo <= cfg.tol_topology;
    }
  } catch (const SolverFailure& e) {
    rec.failure = e.what();
  } catch (const InvalidState& e) {
    rec.failure = e.what();
  }

  if (!converged && rec.failure.empty() && !volume_seen_ok)
    rec.failure = "volume constraint never satisfied within iteration budget";

  rec.converged = converged;
  if (converged) rec.converged_steps.push_back(1);
  rec.final_element_field.assign(chi.data(), chi.data() + chi.size());
  rec.final_nodal_field.assign(phi.data(), phi.data() + phi.size());
  return rec;
}

}  // namespace topo
