#pragma once

#include <Eigen/Dense>

#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

/// Stiff subvolume of each element for a nodal sign field: 1 where all corner
/// values are positive, 0 where all are non-positive, and a tessellated
/// fraction on sign-crossing elements (trilinear interpolant, one level of
/// subcell refinement, six tetrahedra per cell). Continuous and monotone in a
/// uniform shift of psi.
Eigen::VectorXd element_stiff_fractions(const Eigen::VectorXd& psi,
                                        const Grid& grid);

/// Total stiff volume |Omega+| implied by the nodal field (mask-free).
double volume_from_psi(const Eigen::VectorXd& psi, const Grid& grid);

/// Fraction of {linear interpolant > 0} on a tetrahedron with corner values d.
/// Exposed for testing against dense-subsampling estimates.
double tet_positive_fraction(double d0, double d1, double d2, double d3);

struct CutResult {
  Eigen::VectorXd psi;       // nodal discrimination function
  Eigen::VectorXd chi;       // element characteristic factors in [beta, 1]
  Eigen::VectorXd fractions; // element stiff volume fractions in [0, 1]
  double lambda = 0.0;
};

/// Cuts the regularized pseudo-energy at a bisected multiplier so the void
/// fraction of the designable domain matches t within tol:
/// psi = xi_reg - lambda / |Omega|, chi_e = beta + (1 - beta) V_f(e).
/// Passive masks override the element classification.
CutResult cutting_bisection(const Eigen::VectorXd& xi_reg, double t_void,
                            const Grid& grid, const DomainMasks& masks,
                            double beta, double tol);

RunRecord run_vartop(const Grid& grid, const ProblemSpec& prob,
                     const MethodConfig& cfg);

}  // namespace topo
