#pragma once

#include <Eigen/Dense>

#include "topo/filters.hpp"
#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

/// One explicit Hamilton-Jacobi pseudo-time step:
/// phi' = clip(phi + dt * kappa * (sens_nodal - (lambda + s * C0)), -1, 1),
/// then the screened-Laplacian smoothing, then a final clip keeping the bound
/// invariant. Volume terms are expressed in domain fractions, so |Omega|
/// normalizes to one. The multiplier update lambda += s * C0 is the caller's
/// responsibility (once per iteration).
Eigen::VectorXd hj_update(const Eigen::VectorXd& phi,
                          const Eigen::VectorXd& sens_nodal, double lambda,
                          double s, double C0, double dt, double kappa,
                          const NodalLaplacian& reg);

RunRecord run_levelset(const Grid& grid, const ProblemSpec& prob,
                       const MethodConfig& cfg);

}  // namespace topo
