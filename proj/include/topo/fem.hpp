#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

using SpMat = Eigen::SparseMatrix<double>;

/// Reference element stiffness K_e^+ for the stiff phase: 24x24 trilinear hex
/// in 3D, 8x8 bilinear quad (plane stress, unit thickness) in 2D. Integrated
/// with 2-point Gauss quadrature per axis, which is exact for the trilinear
/// B^T C B integrand on an axis-aligned cube.
Eigen::MatrixXd reference_element_stiffness(double E, double nu, double h,
                                            int dim);

/// Isotropic constitutive matrix (6x6 Voigt in 3D, 3x3 plane stress in 2D).
Eigen::MatrixXd constitutive_matrix(double E, double nu, int dim);

/// Global stiffness: sum of scale(e) * K_e^+ scattered by connectivity plus
/// spring diagonal contributions. All scales must be > 0.
SpMat assemble(const Grid& grid, const Eigen::VectorXd& scale,
               const Eigen::MatrixXd& ke, const SpringSet& springs);

/// Row/column elimination with unit diagonal for the fixed dofs.
void constrain(SpMat& K, const std::vector<int>& fixed_dofs);

/// Moves nonzero prescribed values to the rhs: f -= K * u_prescribed, then
/// pins the prescribed entries so the constrained solve reproduces them.
/// Call with the unconstrained K.
Eigen::VectorXd constrained_rhs(
    const SpMat& K, const Eigen::VectorXd& f,
    const std::vector<std::pair<int, double>>& prescribed);

struct SolveResult {
  Eigen::VectorXd u;
  int iterations = 0;
  double residual = 0.0;
};

struct SolverOptions {
  double rel_tol = 1e-8;
  int max_iters = 50000;
  /// Sparse Cholesky below this dof count, Jacobi-preconditioned CG above.
  int direct_dof_limit = 30000;
};

/// Solves the constrained system. `warm` (may be empty) seeds the CG iteration
/// with the previous optimization iterate; reductions are sequential, so
/// identical inputs give bitwise-identical histories.
SolveResult solve(const SpMat& K_constrained, const Eigen::VectorXd& f,
                  const SolverOptions& opts = {},
                  const Eigen::VectorXd& warm = Eigen::VectorXd());

/// Per-element bilinear products u_a^T K_e^+ u_b (unscaled by the design).
Eigen::VectorXd element_energy(const Grid& grid, const Eigen::MatrixXd& ke,
                               const Eigen::VectorXd& ua,
                               const Eigen::VectorXd& ub);

/// Solves every load case of a problem for a given per-element stiffness
/// scale, holding warm starts per case across optimization iterations.
class StateEvaluator {
 public:
  StateEvaluator(const Grid& grid, const ProblemSpec& prob,
                 SolverOptions opts = {});

  /// Rebuilds K from the scales and solves all cases.
  void solve_cases(const Eigen::VectorXd& scale);

  const Eigen::VectorXd& displacement(int case_idx) const;
  int case_count() const { return static_cast<int>(rhs_.size()); }

  /// Objective value for the problem kind from the last solve.
  double objective() const;

  /// u_a^T K_e^+ u_b per element from the last solve.
  Eigen::VectorXd energy(int case_a, int case_b) const;

  const Eigen::MatrixXd& unit_ke() const { return ke_; }
  const Grid& grid() const { return grid_; }
  const ProblemSpec& problem() const { return prob_; }

 private:
  const Grid& grid_;
  const ProblemSpec& prob_;
  SolverOptions opts_;
  Eigen::MatrixXd ke_;  // K_e^+ at E_plus
  std::vector<Eigen::VectorXd> rhs_;
  std::vector<Eigen::VectorXd> u_;
};

}  // namespace topo
