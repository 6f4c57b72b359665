#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "topo/fem.hpp"
#include "topo/grid.hpp"

namespace topo {

/// Linearly decaying distance filter over element centers,
/// H_ei = max(0, r_min - dist(e, i)) with distances in element-size units.
/// Neighbor offsets and weights are computed once per (grid, r_min).
class ConvolutionFilter {
 public:
  ConvolutionFilter(const Grid& grid, double r_min);

  /// (sum H_ei rho_i s_i) / (max(gamma, rho_e) * sum H_ei)
  Eigen::VectorXd apply_simp(const Eigen::VectorXd& sens,
                             const Eigen::VectorXd& rho,
                             double gamma = 1e-3) const;

  /// (sum H_ei s_i) / (sum H_ei)
  Eigen::VectorXd apply_beso(const Eigen::VectorXd& sens) const;

 private:
  Eigen::VectorXd weighted_sum(const Eigen::VectorXd& field) const;
  Eigen::VectorXd weight_total() const;

  const Grid& grid_;
  struct Offset {
    int di, dj, dk;
    double w;
  };
  std::vector<Offset> offsets_;
};

/// Element-wise Helmholtz PDE filter (I - R^2 Laplacian) with zero-flux
/// boundaries, discretized with a 7-point (5-point in 2D) stencil on the dual
/// grid and factorized once. R = r_min/(2*sqrt(3)) in length units.
class HelmholtzFilter {
 public:
  HelmholtzFilter(const Grid& grid, double r_min);

  /// Raw PDE solve of (I - R^2 Lap) out = in on the element field.
  Eigen::VectorXd apply(const Eigen::VectorXd& field) const;

  /// Sensitivity-filter convention: filters rho_e * sens_e, then divides by
  /// max(gamma, rho_e).
  Eigen::VectorXd apply_sensitivity(const Eigen::VectorXd& sens,
                                    const Eigen::VectorXd& rho,
                                    double gamma = 1e-3) const;

  double radius() const { return R_; }

 private:
  const Grid& grid_;
  double R_;
  Eigen::SimplicialLDLT<SpMat> solver_;
};

/// Nodal screened-Poisson regularization with trilinear (bilinear) elements:
/// solves (M + (tau h)^2 K) x = rhs with homogeneous Neumann conditions.
/// tau == 0 reduces to the identity. Operators are assembled and factorized
/// at construction.
class NodalLaplacian {
 public:
  NodalLaplacian(const Grid& grid, double tau);

  /// Input and output are nodal; rhs = M * input.
  Eigen::VectorXd regularize_nodal(const Eigen::VectorXd& nodal) const;

  /// Element-wise input projected through the shape functions:
  /// rhs_n = sum_e phi_e * integral_e N_n. Output is nodal.
  Eigen::VectorXd regularize_element(const Eigen::VectorXd& elem) const;

  /// sqrt(x^T M x)
  double mass_norm(const Eigen::VectorXd& nodal) const;

  double tau() const { return tau_; }

 private:
  const Grid& grid_;
  double tau_;
  SpMat mass_;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> solver_;  // null when tau == 0
};

/// Two-iterate historical average (BESO temporal filter). First call returns
/// the input unchanged; later calls return the mean with the stored history,
/// which then becomes the new history.
class TemporalAverage {
 public:
  Eigen::VectorXd apply(const Eigen::VectorXd& current);
  void reset() { has_prev_ = false; }

 private:
  bool has_prev_ = false;
  Eigen::VectorXd prev_;
};

/// Node value = plain average of adjacent element values (volume-weighted on
/// a uniform grid).
Eigen::VectorXd element_to_node_average(const Grid& grid,
                                        const Eigen::VectorXd& elem_field);

}  // namespace topo
