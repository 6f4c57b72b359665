#pragma once

#include <Eigen/Dense>

#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

enum class SimpVariant { I, II, III };

/// One optimality-criteria sweep at a fixed multiplier:
/// rho'_e = clamp(rho_e * B_e^eta, rho_e - m, rho_e + m) intersected with
/// [0,1], B_e = -dJ_e / (lambda dC_e). Mechanism mode substitutes
/// B_e = max(eps, -dJ_e) / (lambda dC_e) so positive sensitivities stay
/// workable. Throws on non-finite B_e.
Eigen::VectorXd oc_update(const Eigen::VectorXd& rho,
                          const Eigen::VectorXd& dJ,
                          const Eigen::VectorXd& dC, double lambda, double move,
                          double eta, bool mechanism);

struct OcResult {
  Eigen::VectorXd rho;
  double lambda = 0.0;
  bool feasible = true;  // false when move limits blocked the target volume
};

/// Bisects the multiplier until the updated design hits the target stiff
/// fraction within tol (or the bracket/step budget runs out, flagged).
/// Passive elements are pinned and excluded from the accounting.
OcResult oc_bisection(const Eigen::VectorXd& rho, const Eigen::VectorXd& dJ,
                      const Grid& grid, const DomainMasks& masks,
                      double target_fraction, double move, double eta,
                      bool mechanism, double tol);

RunRecord run_simp(SimpVariant variant, const Grid& grid,
                   const ProblemSpec& prob, const MethodConfig& cfg);

}  // namespace topo
