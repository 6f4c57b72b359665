#include "topo/simp.hpp"

#include <cmath>

#include "run_common.hpp"
#include "topo/convergence.hpp"
#include "topo/filters.hpp"
#include "topo/sensitivity.hpp"

namespace topo {

Eigen::VectorXd oc_update(const Eigen::VectorXd& rho,
                          const Eigen::VectorXd& dJ,
                          const Eigen::VectorXd& dC, double lambda, double move,
                          double eta, bool mechanism) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  constexpr double eps = 1e-12;
  Eigen::VectorXd out(rho.size());
  for (int e = 0; e < rho.size(); ++e) {
    const double num = mechanism ? std::max(eps, -dJ[e]) : -dJ[e];
    const double B = num / (lambda * dC[e]);
    if (!std::isfinite(B) || B < 0.0)
      throw InvalidState("non-finite or negative OC ratio");
    double cand = rho[e] * std::pow(B, eta);
    cand = std::clamp(cand, rho[e] - move, rho[e] + move);
    out[e] = std::clamp(cand, 0.0, 1.0);
  }
  return out;
}

OcResult oc_bisection(const Eigen::VectorXd& rho, const Eigen::VectorXd& dJ,
                      const Grid& grid, const DomainMasks& masks,
                      double target_fraction, double move, double eta,
                      bool mechanism, double tol) {
  const auto acct = detail::VolumeAccounting::build(grid, masks);
  Eigen::VectorXd dC =
      Eigen::VectorXd::Constant(rho.size(), grid.elem_volume() / acct.denom);

  auto evaluate = [&](double lambda) {
    Eigen::VectorXd r = oc_update(rho, dJ, dC, lambda, move, eta, mechanism);
    detail::apply_masks(r, masks, 0.0, 1.0);
    return r;
  };

  double lo = 1e-9, hi = 1e9;
  // volume(lambda) is non-increasing; widen until the target is bracketed
  int expand = 0;
  while (acct.fraction(grid, masks, evaluate(lo)) < target_fraction &&
         expand < 30) {
    lo /= 10.0;
    ++expand;
  }
  expand = 0;
  while (acct.fraction(grid, masks, evaluate(hi)) > target_fraction &&
         expand < 30) {
    hi *= 10.0;
    ++expand;
  }

  // run the bracket down to machine precision even after the volume is
  // within tolerance: a coarse lambda leaves a quantized update that
  // oscillates between iterations and stalls the objective criterion
  for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);  // lambda spans many decades
    const double f = acct.fraction(grid, masks, evaluate(mid));
    (f > target_fraction ? lo : hi) = mid;
  }
  OcResult res;
  res.lambda = std::sqrt(lo * hi);
  res.rho = evaluate(res.lambda);
  res.feasible = std::abs(acct.fraction(grid, masks, res.rho) -
                          target_fraction) <= tol;
  return res;
}

RunRecord run_simp(SimpVariant variant, const Grid& grid,
                   const ProblemSpec& prob, const MethodConfig& cfg) {
  RunRecord rec;
  rec.method = variant == SimpVariant::I
                   ? Method::SimpI
                   : (variant == SimpVariant::II ? Method::SimpII
                                                 : Method::SimpIII);
  const bool mech = prob.objective == Objective::Mechanism;
  const double alpha = prob.material.alpha;
  const double fbar = prob.target_fraction;
  const auto acct = detail::VolumeAccounting::build(grid, prob.masks);

  SolverOptions sopts;
  sopts.rel_tol = cfg.solver_rel_tol;
  StateEvaluator eval(grid, prob, sopts);

  // variants I and II share the PDE filter; III uses the distance filter
  std::unique_ptr<HelmholtzFilter> helm;
  std::unique_ptr<ConvolutionFilter> conv;
  if (variant == SimpVariant::III)
    conv = std::make_unique<ConvolutionFilter>(grid, cfg.r_min);
  else
    helm = std::make_unique<HelmholtzFilter>(grid, cfg.r_min);

  const bool full_solid_start = variant == SimpVariant::II;
  Eigen::VectorXd rho = Eigen::VectorXd::Constant(
      grid.elem_count(), full_solid_start ? 1.0 : fbar);
  detail::apply_masks(rho, prob.masks, 0.0, 1.0);

  const double J0 = detail::reference_objective(eval, grid, prob);
  rec.J0 = J0;
  const double J0n = detail::j0_norm(J0);
  detail::push_record(rec, 0, 0, J0, J0, 1.0, detail::nan_marker(),
                      detail::nan_marker(), 0.0);

  const int n_steps = variant == SimpVariant::II ? cfg.n_steps : 1;
  int iter = 0;
  bool converged = false;

  try {
    for (int j = 1; j <= n_steps; ++j) {
      const double f_j =
          variant == SimpVariant::II
              ? volume_schedule(1.0, fbar, cfg.k_factor, n_steps, j)
              : fbar;
      const double tolJ = tolerance_schedule(j, n_steps, cfg.tol_J);
      const double tolT = tolerance_schedule(j, n_steps, cfg.tol_topology);

      std::vector<double> stepJ;
      if (full_solid_start && j == 1) stepJ.push_back(J0);
      bool step_done = false;

      for (int it = 0; it < cfg.max_iters_per_step && iter < cfg.max_iters;
           ++it) {
        ++iter;
        Eigen::VectorXd scale(grid.elem_count());
        for (int e = 0; e < grid.elem_count(); ++e)
          scale[e] = alpha + std::pow(rho[e], cfg.p) * (1.0 - alpha);
        eval.solve_cases(scale);
        const double J = eval.objective();

        Eigen::VectorXd dJ = simp_sensitivity(eval, rho, cfg.p, alpha);
        Eigen::VectorXd dJf = variant == SimpVariant::III
                                  ? conv->apply_simp(dJ, rho)
                                  : helm->apply_sensitivity(dJ, rho);

        OcResult oc = oc_bisection(rho, dJf, grid, prob.masks, f_j, cfg.move,
                                   cfg.eta, mech, cfg.tol_volume);

        stepJ.push_back(J);
        const auto dJc = objective_criterion(stepJ, cfg.window, J0n);
        const double dtopo =
            topology_criterion(rho, oc.rho, grid, TopologyMode::Element);
        const double vol = acct.fraction(grid, prob.masks, oc.rho);
        detail::push_record(rec, iter, j, J, J0, vol,
                            dJc ? *dJc : detail::nan_marker(), dtopo,
                            oc.lambda);
        rho = oc.rho;

        const bool vol_ok = std::abs(vol - f_j) <= cfg.tol_volume;
        const bool J_ok =
            !cfg.use_objective_criterion || (dJc && *dJc <= tolJ);
        if (vol_ok && J_ok && dJc.has_value() && dtopo <= tolT) {
          step_done = true;
          break;
        }
      }
      if (step_done) rec.converged_steps.push_back(j);
      if (j == n_steps) converged = step_done;
    }
  } catch (const SolverFailure& e) {
    rec.failure = e.what();
  }

  rec.converged = converged;
  rec.final_element_field.assign(rho.data(), rho.data() + rho.size());
  return rec;
}

}  // namespace topo
