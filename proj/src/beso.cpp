#include "topo/beso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "run_common.hpp"
#include "topo/convergence.hpp"
#include "topo/filters.hpp"
#include "topo/sensitivity.hpp"

namespace topo {

double beso_volume_step(double f_k, double er, double fbar) {
  if (!(er > 0.0 && er < 1.0)) throw InvalidArgument("ER must be in (0,1)");
  return std::max(fbar, (1.0 - er) * f_k);
}

namespace {

BesoUpdateResult discrete_update(const Eigen::VectorXd& rho,
                                 const Eigen::VectorXd& s, const Grid& grid,
                                 const DomainMasks& masks, double f_target,
                                 double ar_max, double rho_min,
                                 const detail::VolumeAccounting& acct) {
  const double ve = grid.elem_volume();
  const int n_active = static_cast<int>(acct.active.size());
  if (n_active == 0) throw InvalidState("no designable elements");
  int n_solid = static_cast<int>(
      std::lround((f_target * acct.denom - acct.passive_solid) / ve));
  n_solid = std::clamp(n_solid, 0, n_active);

  // rank designable elements: higher sensitivity first, index breaks ties
  std::vector<int> order = acct.active;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return a < b;
  });

  std::vector<int> adds, keeps;
  for (int i = 0; i < n_solid; ++i)
    (rho[order[i]] == 1.0 ? keeps : adds).push_back(order[i]);

  const int cap = static_cast<int>(std::floor(ar_max * n_active));
  if (static_cast<int>(adds.size()) > cap) {
    adds.resize(cap);  // ranking order: the best candidates survive
    const int keep_quota = n_solid - cap;
    keeps.clear();
    for (int e : order) {
      if (static_cast<int>(keeps.size()) >= keep_quota) break;
      if (rho[e] == 1.0) keeps.push_back(e);
    }
  }

  BesoUpdateResult res;
  res.rho = Eigen::VectorXd::Constant(rho.size(), rho_min);
  for (int e : keeps) res.rho[e] = 1.0;
  for (int e : adds) res.rho[e] = 1.0;
  detail::apply_masks(res.rho, masks, rho_min, 1.0);
  res.lambda = n_solid > 0 && n_solid <= static_cast<int>(order.size())
                   ? s[order[n_solid - 1]]
                   : 0.0;
  return res;
}

BesoUpdateResult relaxed_update(const Eigen::VectorXd& rho,
                                const Eigen::VectorXd& s, const Grid& grid,
                                const DomainMasks& masks, double f_target,
                                double rho_min, double move,
                                const detail::VolumeAccounting& acct,
                                double tol) {
  double lo = s.minCoeff() - 1.0, hi = s.maxCoeff() + 1.0;
  auto evaluate = [&](double lambda) {
    Eigen::VectorXd r = rho;
    for (int e : acct.active)
      r[e] = std::clamp(rho[e] + (s[e] > lambda ? move : -move), rho_min, 1.0);
    detail::apply_masks(r, masks, rho_min, 1.0);
    return r;
  };
  BesoUpdateResult res;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    res.rho = evaluate(mid);
    res.lambda = mid;
    const double f = acct.fraction(grid, masks, res.rho);
    if (std::abs(f - f_target) <= tol) return res;
    (f > f_target ? lo : hi) = mid;
  }
  return res;  // move limits can block the target early in the run
}

}  // namespace

BesoUpdateResult beso_update(const Eigen::VectorXd& rho,
                             const Eigen::VectorXd& sens_filtered,
                             const Grid& grid, const DomainMasks& masks,
                             double f_target, double ar_max, double rho_min,
                             double move, bool mechanism, double tol) {
  const auto acct = detail::VolumeAccounting::build(grid, masks);
  // rank by descending -dJ: removing low-impact material first
  const Eigen::VectorXd s = -sens_filtered;
  if (mechanism)
    return relaxed_update(rho, s, grid, masks, f_target, rho_min, move, acct,
                          tol);
  return discrete_update(rho, s, grid, masks, f_target, ar_max, rho_min, acct);
}

RunRecord run_beso(const Grid& grid, const ProblemSpec& prob,
                   const MethodConfig& cfg) {
  RunRecord rec;
  rec.method = Method::Beso;
  const bool mech = prob.objective == Objective::Mechanism;
  const double fbar = prob.target_fraction;
  const double rho_min = std::pow(prob.material.alpha, 1.0 / cfg.p);
  const auto acct = detail::VolumeAccounting::build(grid, prob.masks);

  SolverOptions sopts;
  sopts.rel_tol = cfg.solver_rel_tol;
  StateEvaluator eval(grid, prob, sopts);
  ConvolutionFilter conv(grid, cfg.r_min);
  NodalLaplacian crit_reg(grid, cfg.tau_criterion);
  TemporalAverage temporal;

  Eigen::VectorXd rho = Eigen::VectorXd::Ones(grid.elem_count());
  detail::apply_masks(rho, prob.masks, rho_min, 1.0);

  const double J0 = detail::reference_objective(eval, grid, prob);
  rec.J0 = J0;
  const double J0n = detail::j0_norm(J0);
  detail::push_record(rec, 0, 0, J0, J0, 1.0, detail::nan_marker(),
                      detail::nan_marker(), 0.0);

  double f_current = 1.0;
  std::vector<double> stepJ{J0};
  bool at_floor = false;
  bool converged = false;

  try {
    for (int iter = 1; iter <= cfg.max_iters && !converged; ++iter) {
      const double f_target = beso_volume_step(f_current, cfg.er, fbar);
      if (!at_floor && f_target == fbar) {
        // convergence bookkeeping starts once the final volume is reached
        at_floor = true;
        stepJ.clear();
      }

      Eigen::VectorXd scale(grid.elem_count());
      for (int e = 0; e < grid.elem_count(); ++e)
        scale[e] = std::pow(rho[e], cfg.p);
      eval.solve_cases(scale);
      const double J = eval.objective();

      Eigen::VectorXd dJ = beso_sensitivity(eval, rho, cfg.p);
      Eigen::VectorXd sf = temporal.apply(conv.apply_beso(dJ));

      BesoUpdateResult upd =
          beso_update(rho, sf, grid, prob.masks, f_target, cfg.ar_max, rho_min,
                      cfg.move, mech, cfg.tol_volume);

      stepJ.push_back(J);
      std::optional<double> dJc;
      if (at_floor) dJc = objective_criterion(stepJ, cfg.window, J0n);
      const double dtopo = topology_criterion(rho, upd.rho, grid,
                                              TopologyMode::Nodal, &crit_reg);
      // stiff material fraction: the rho_min tail carries no volume, else
      // its mass cancels the 1% decrement and the schedule stalls
      double vol;
      if (mech) {
        vol = acct.fraction(grid, prob.masks, upd.rho);
      } else {
        double stiff = acct.passive_solid;
        for (int e : acct.active)
          if (upd.rho[e] == 1.0) stiff += grid.elem_volume();
        vol = stiff / acct.denom;
      }
      detail::push_record(rec, iter, at_floor ? 1 : 0, J, J0, vol,
                          dJc ? *dJc : detail::nan_marker(), dtopo,
                          upd.lambda);
      rho = upd.rho;
      f_current = f_target;  // the schedule, not the quantized measurement

      if (at_floor) {
        const bool vol_ok = std::abs(vol - fbar) <= cfg.tol_volume;
        const bool J_ok =
            !cfg.use_objective_criterion || (dJc && *dJc <= cfg.tol_J);
        converged = vol_ok && J_ok && dJc.has_value() &&
                    dtopo <= cfg.tol_topology;
        if (mech && vol_ok && dtopo <= cfg.tol_topology) converged = true;
      }
    }
  } catch (const SolverFailure& e) {
    rec.failure = e.what();
  }

  rec.converged = converged;
  if (converged) rec.converged_steps.push_back(1);
  rec.final_element_field.assign(rho.data(), rho.data() + rho.size());
  return rec;
}

}  // namespace topo
