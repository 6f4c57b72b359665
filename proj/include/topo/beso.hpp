#pragma once

#include <Eigen/Dense>

#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

/// Evolutionary volume reduction, f_{k+1} = max(fbar, (1 - ER) f_k).
double beso_volume_step(double f_k, double er, double fbar);

struct BesoUpdateResult {
  Eigen::VectorXd rho;
  double lambda = 0.0;  // ranking threshold (compliance) or bisected cut
};

/// Discrete density update. Compliance mode ranks elements by the filtered
/// sensitivity and thresholds so the stiff fraction hits f_target, with
/// void-to-solid additions rationed to ar_max * designable count (removals
/// grow to compensate). Mechanism mode moves each density by +-move around a
/// bisected threshold, clamped to [rho_min, 1]. Ties break by element index.
BesoUpdateResult beso_update(const Eigen::VectorXd& rho,
                             const Eigen::VectorXd& sens_filtered,
                             const Grid& grid, const DomainMasks& masks,
                             double f_target, double ar_max, double rho_min,
                             double move, bool mechanism, double tol);

RunRecord run_beso(const Grid& grid, const ProblemSpec& prob,
                   const MethodConfig& cfg);

}  // namespace topo
