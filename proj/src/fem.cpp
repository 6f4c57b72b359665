#include "topo/fem.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

namespace topo {

Eigen::MatrixXd constitutive_matrix(double E, double nu, int dim) {
  if (!(E > 0.0)) throw InvalidArgument("Young's modulus must be > 0");
  if (nu < 0.0 || nu >= 0.5) throw InvalidArgument("Poisson ratio must be in [0, 0.5)");
  if (dim == 2) {
    // plane stress
    Eigen::MatrixXd C(3, 3);
    const double c = E / (1.0 - nu * nu);
    C << c, c * nu, 0, c * nu, c, 0, 0, 0, c * (1.0 - nu) / 2.0;
    return C;
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(6, 6);
  const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) C(a, b) = c * nu;
    C(a, a) = c * (1.0 - nu);
    C(3 + a, 3 + a) = c * (1.0 - 2.0 * nu) / 2.0;
  }
  return C;
}

namespace {

// Shape-function derivatives wrt natural coordinates at (xi, eta, zeta).
void hex_dshape(double xi, double eta, double zeta, double dN[8][3]) {
  const double s[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                          {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  for (int a = 0; a < 8; ++a) {
    dN[a][0] = 0.125 * s[a][0] * (1 + s[a][1] * eta) * (1 + s[a][2] * zeta);
    dN[a][1] = 0.125 * s[a][1] * (1 + s[a][0] * xi) * (1 + s[a][2] * zeta);
    dN[a][2] = 0.125 * s[a][2] * (1 + s[a][0] * xi) * (1 + s[a][1] * eta);
  }
}

void quad_dshape(double xi, double eta, double dN[4][2]) {
  const double s[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (int a = 0; a < 4; ++a) {
    dN[a][0] = 0.25 * s[a][0] * (1 + s[a][1] * eta);
    dN[a][1] = 0.25 * s[a][1] * (1 + s[a][0] * xi);
  }
}

}  // namespace

Eigen::MatrixXd reference_element_stiffness(double E, double nu, double h,
                                            int dim) {
  if (!(h > 0.0)) throw InvalidArgument("elem_size must be > 0");
  const Eigen::MatrixXd C = constitutive_matrix(E, nu, dim);
  const double g = 1.0 / std::sqrt(3.0);
  const double jac = h / 2.0;  // d(x)/d(xi) per axis

  if (dim == 2) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(8, 8);
    for (int gx = 0; gx < 2; ++gx) {
      for (int gy = 0; gy < 2; ++gy) {
        const double xi = g * (gx ? 1 : -1), eta = g * (gy ? 1 : -1);
        double dN[4][2];
        quad_dshape(xi, eta, dN);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 8);
        for (int a = 0; a < 4; ++a) {
          const double dx = dN[a][0] / jac, dy = dN[a][1] / jac;
          B(0, 2 * a) = dx;
          B(1, 2 * a + 1) = dy;
          B(2, 2 * a) = dy;
          B(2, 2 * a + 1) = dx;
        }
        K += B.transpose() * C * B * (jac * jac);  // gauss weight 1
      }
    }
    return K;
  }

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(24, 24);
  for (int gx = 0; gx < 2; ++gx) {
    for (int gy = 0; gy < 2; ++gy) {
      for (int gz = 0; gz < 2; ++gz) {
        const double xi = g * (gx ? 1 : -1), eta = g * (gy ? 1 : -1),
                     zeta = g * (gz ? 1 : -1);
        double dN[8][3];
        hex_dshape(xi, eta, zeta, dN);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 24);
        for (int a = 0; a < 8; ++a) {
          const double dx = dN[a][0] / jac, dy = dN[a][1] / jac,
                       dz = dN[a][2] / jac;
          B(0, 3 * a) = dx;
          B(1, 3 * a + 1) = dy;
          B(2, 3 * a + 2) = dz;
          B(3, 3 * a) = dy;
          B(3, 3 * a + 1) = dx;
          B(4, 3 * a + 1) = dz;
          B(4, 3 * a + 2) = dy;
          B(5, 3 * a) = dz;
          B(5, 3 * a + 2) = dx;
        }
        K += B.transpose() * C * B * (jac * jac * jac);
      }
    }
  }
  // enforce exact symmetry against quadrature round-off
  return 0.5 * (K + K.transpose());
}

SpMat assemble(const Grid& grid, const Eigen::VectorXd& scale,
               const Eigen::MatrixXd& ke, const SpringSet& springs) {
  if (scale.size() != grid.elem_count())
    throw InvalidArgument("scale vector size mismatch");
  const int edofs = grid.nodes_per_elem() * grid.dof_per_node();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(grid.elem_count()) * edofs * edofs +
                springs.entries.size());
  std::array<int, 24> dofs{};
  for (int e = 0; e < grid.elem_count(); ++e) {
    const double s = scale[e];
    if (!(s > 0.0)) throw InvalidArgument("element stiffness scale must be > 0");
    grid.elem_dofs(e, dofs);
    for (int a = 0; a < edofs; ++a)
      for (int b = 0; b < edofs; ++b)
        trips.emplace_back(dofs[a], dofs[b], s * ke(a, b));
  }
  for (const auto& [dof, k] : springs.entries) {
    if (!(k > 0.0)) throw InvalidArgument("spring stiffness must be > 0");
    trips.emplace_back(dof, dof, k);
  }
  SpMat K(grid.dof_count(), grid.dof_count());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

void constrain(SpMat& K, const std::vector<int>& fixed_dofs) {
  std::vector<char> fixed(K.rows(), 0);
  for (int d : fixed_dofs) fixed[d] = 1;
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SpMat::InnerIterator it(K, col); it; ++it) {
      if (fixed[it.row()] || fixed[it.col()])
        it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    }
  }
  K.prune(0.0);
}

Eigen::VectorXd constrained_rhs(
    const SpMat& K, const Eigen::VectorXd& f,
    const std::vector<std::pair<int, double>>& prescribed) {
  Eigen::VectorXd up = Eigen::VectorXd::Zero(f.size());
  for (const auto& [dof, val] : prescribed) up[dof] = val;
  Eigen::VectorXd rhs = f - K * up;
  for (const auto& [dof, val] : prescribed) rhs[dof] = val;
  return rhs;
}

SolveResult solve(const SpMat& K, const Eigen::VectorXd& f,
                  const SolverOptions& opts, const Eigen::VectorXd& warm) {
  SolveResult res;
  const double fnorm = f.norm();
  if (fnorm == 0.0) {
    res.u = Eigen::VectorXd::Zero(f.size());
    return res;
  }

  if (K.rows() <= opts.direct_dof_limit) {
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success)
      throw SolverFailure("sparse Cholesky factorization failed", -1.0);
    res.u = ldlt.solve(f);
    res.residual = (K * res.u - f).norm() / fnorm;
    return res;
  }

  // Jacobi-preconditioned CG, sequential reductions.
  Eigen::VectorXd dinv(K.rows());
  for (int i = 0; i < K.rows(); ++i) {
    const double d = K.coeff(i, i);
    dinv[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  Eigen::VectorXd x =
      warm.size() == f.size() ? warm : Eigen::VectorXd::Zero(f.size());
  Eigen::VectorXd r = f - K * x;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < opts.max_iters; ++it) {
    if (r.norm() / fnorm <= opts.rel_tol) {
      res.u = x;
      res.iterations = it;
      res.residual = r.norm() / fnorm;
      return res;
    }
    const Eigen::VectorXd Kp = K * p;
    const double alpha = rz / p.dot(Kp);
    x += alpha * p;
    r -= alpha * Kp;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverFailure("CG failed to converge", r.norm() / fnorm);
}

Eigen::VectorXd element_energy(const Grid& grid, const Eigen::MatrixXd& ke,
                               const Eigen::VectorXd& ua,
                               const Eigen::VectorXd& ub) {
  if (ua.size() != grid.dof_count() || ub.size() != grid.dof_count())
    throw InvalidArgument("displacement vector size mismatch");
  const int edofs = grid.nodes_per_elem() * grid.dof_per_node();
  Eigen::VectorXd out(grid.elem_count());
  std::array<int, 24> dofs{};
  Eigen::VectorXd ue(edofs), ve(edofs);
  for (int e = 0; e < grid.elem_count(); ++e) {
    grid.elem_dofs(e, dofs);
    for (int a = 0; a < edofs; ++a) {
      ue[a] = ua[dofs[a]];
      ve[a] = ub[dofs[a]];
    }
    out[e] = ue.dot(ke * ve);
  }
  return out;
}

StateEvaluator::StateEvaluator(const Grid& grid, const ProblemSpec& prob,
                               SolverOptions opts)
    : grid_(grid), prob_(prob), opts_(opts) {
  ke_ = reference_element_stiffness(prob.material.E, prob.material.nu,
                                    grid.h(), grid.dim());
  if (prob.objective == Objective::MultiLoad && prob.loads.size() < 2)
    throw InvalidState("multi-load problem needs at least two load cases");
  if (prob.objective == Objective::Mechanism &&
      (prob.loads.size() != 2 || prob.springs.empty()))
    throw InvalidState("mechanism problem needs two load cases and port springs");
  for (const auto& lc : prob.loads) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.dof_count());
    for (const auto& [dof, val] : lc.forces) {
      if (dof < 0 || dof >= grid.dof_count())
        throw InvalidArgument("load dof out of range");
      f[dof] += val;
    }
    for (int d : prob.masks.fixed_dofs) f[d] = 0.0;
    rhs_.push_back(std::move(f));
  }
  u_.resize(rhs_.size());
}

void StateEvaluator::solve_cases(const Eigen::VectorXd& scale) {
  SpMat K = assemble(grid_, scale, ke_, prob_.springs);
  constrain(K, prob_.masks.fixed_dofs);
  for (std::size_t i = 0; i < rhs_.size(); ++i) {
    SolveResult r = solve(K, rhs_[i], opts_, u_[i]);
    u_[i] = std::move(r.u);
  }
}

const Eigen::VectorXd& StateEvaluator::displacement(int case_idx) const {
  return u_.at(case_idx);
}

double StateEvaluator::objective() const {
  switch (prob_.objective) {
    case Objective::MinCompliance:
      return rhs_[0].dot(u_[0]);
    case Objective::MultiLoad: {
      double J = 0;
      for (std::size_t i = 0; i < rhs_.size(); ++i) J += rhs_[i].dot(u_[i]);
      return J;
    }
    case Objective::Mechanism:
      // J = -(dummy load)^T u^(1): more output displacement, more negative J
      return -rhs_[1].dot(u_[0]);
  }
  return 0.0;
}

Eigen::VectorXd StateEvaluator::energy(int case_a, int case_b) const {
  return element_energy(grid_, ke_, u_.at(case_a), u_.at(case_b));
}

}  // namespace topo
