#include "topo/filters.hpp"

#include <cmath>

namespace topo {

ConvolutionFilter::ConvolutionFilter(const Grid& grid, double r_min)
    : grid_(grid) {
  if (!(r_min > 0.0)) throw InvalidArgument("r_min must be > 0");
  const int reach = static_cast<int>(std::ceil(r_min));
  const int kreach = grid.dim() == 3 ? reach : 0;
  for (int dk = -kreach; dk <= kreach; ++dk) {
    for (int dj = -reach; dj <= reach; ++dj) {
      for (int di = -reach; di <= reach; ++di) {
        const double dist = std::sqrt(double(di * di + dj * dj + dk * dk));
        const double w = r_min - dist;
        if (w > 0.0) offsets_.push_back({di, dj, dk, w});
      }
    }
  }
}

Eigen::VectorXd ConvolutionFilter::weighted_sum(
    const Eigen::VectorXd& field) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid_.elem_count());
  const int nz = grid_.dim() == 3 ? grid_.nz() : 1;
  for (int e = 0; e < grid_.elem_count(); ++e) {
    const auto [i, j, k] = grid_.elem_ijk(e);
    double acc = 0.0;
    for (const auto& o : offsets_) {
      const int ii = i + o.di, jj = j + o.dj, kk = k + o.dk;
      if (ii < 0 || ii >= grid_.nx() || jj < 0 || jj >= grid_.ny() || kk < 0 ||
          kk >= nz)
        continue;
      acc += o.w * field[grid_.elem_id(ii, jj, kk)];
    }
    out[e] = acc;
  }
  return out;
}

Eigen::VectorXd ConvolutionFilter::weight_total() const {
  return weighted_sum(Eigen::VectorXd::Ones(grid_.elem_count()));
}

Eigen::VectorXd ConvolutionFilter::apply_simp(const Eigen::VectorXd& sens,
                                              const Eigen::VectorXd& rho,
                                              double gamma) const {
  const Eigen::VectorXd num = weighted_sum(rho.cwiseProduct(sens));
  const Eigen::VectorXd den = weight_total();
  Eigen::VectorXd out(sens.size());
  for (int e = 0; e < sens.size(); ++e)
    out[e] = num[e] / (std::max(gamma, rho[e]) * den[e]);
  return out;
}

Eigen::VectorXd ConvolutionFilter::apply_beso(
    const Eigen::VectorXd& sens) const {
  const Eigen::VectorXd num = weighted_sum(sens);
  const Eigen::VectorXd den = weight_total();
  return num.cwiseQuotient(den);
}

HelmholtzFilter::HelmholtzFilter(const Grid& grid, double r_min)
    : grid_(grid), R_(r_min * grid.h() / (2.0 * std::sqrt(3.0))) {
  const double c = (R_ * R_) / (grid.h() * grid.h());
  const int nz = grid.dim() == 3 ? grid.nz() : 1;
  std::vector<Eigen::Triplet<double>> trips;
  auto add = [&](int e, int i, int j, int k) {
    // graph-Laplacian coupling; missing neighbors realize zero flux
    if (i < 0 || i >= grid.nx() || j < 0 || j >= grid.ny() || k < 0 || k >= nz)
      return;
    const int nb = grid_.elem_id(i, j, k);
    trips.emplace_back(e, e, c);
    trips.emplace_back(e, nb, -c);
  };
  for (int e = 0; e < grid.elem_count(); ++e) {
    const auto [i, j, k] = grid.elem_ijk(e);
    trips.emplace_back(e, e, 1.0);
    add(e, i - 1, j, k);
    add(e, i + 1, j, k);
    add(e, i, j - 1, k);
    add(e, i, j + 1, k);
    if (grid.dim() == 3) {
      add(e, i, j, k - 1);
      add(e, i, j, k + 1);
    }
  }
  SpMat A(grid.elem_count(), grid.elem_count());
  A.setFromTriplets(trips.begin(), trips.end());
  solver_.compute(A);
  if (solver_.info() != Eigen::Success)
    throw InvalidState("Helmholtz filter factorization failed");
}

Eigen::VectorXd HelmholtzFilter::apply(const Eigen::VectorXd& field) const {
  return solver_.solve(field);
}

Eigen::VectorXd HelmholtzFilter::apply_sensitivity(const Eigen::VectorXd& sens,
                                                   const Eigen::VectorXd& rho,
                                                   double gamma) const {
  const Eigen::VectorXd filtered = apply(rho.cwiseProduct(sens));
  Eigen::VectorXd out(sens.size());
  for (int e = 0; e < sens.size(); ++e)
    out[e] = filtered[e] / std::max(gamma, rho[e]);
  return out;
}

namespace {

// 1D mass and Laplacian element matrices for linear shape functions on [0,h];
// tensor products give the quad/hex matrices.
void line_matrices(double h, Eigen::Matrix2d& m, Eigen::Matrix2d& k) {
  m << 2, 1, 1, 2;
  m *= h / 6.0;
  k << 1, -1, -1, 1;
  k /= h;
}

}  // namespace

NodalLaplacian::NodalLaplacian(const Grid& grid, double tau)
    : grid_(grid), tau_(tau) {
  if (tau < 0.0) throw InvalidArgument("tau must be >= 0");
  const double h = grid.h();
  Eigen::Matrix2d m1, k1;
  line_matrices(h, m1, k1);

  const int npe = grid.nodes_per_elem();
  Eigen::MatrixXd me(npe, npe), ke(npe, npe);
  // local node (i,j,k) bits per the element-local ordering
  const int bits3[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                           {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  for (int a = 0; a < npe; ++a) {
    for (int b = 0; b < npe; ++b) {
      if (grid.dim() == 2) {
        me(a, b) = m1(bits3[a][0], bits3[b][0]) * m1(bits3[a][1], bits3[b][1]);
        ke(a, b) = k1(bits3[a][0], bits3[b][0]) * m1(bits3[a][1], bits3[b][1]) +
                   m1(bits3[a][0], bits3[b][0]) * k1(bits3[a][1], bits3[b][1]);
      } else {
        const double mx = m1(bits3[a][0], bits3[b][0]),
                     my = m1(bits3[a][1], bits3[b][1]),
                     mz = m1(bits3[a][2], bits3[b][2]);
        const double kx = k1(bits3[a][0], bits3[b][0]),
                     ky = k1(bits3[a][1], bits3[b][1]),
                     kz = k1(bits3[a][2], bits3[b][2]);
        me(a, b) = mx * my * mz;
        ke(a, b) = kx * my * mz + mx * ky * mz + mx * my * kz;
      }
    }
  }

  std::vector<Eigen::Triplet<double>> mt, at;
  std::array<int, 8> nodes{};
  const double th2 = (tau * h) * (tau * h);
  for (int e = 0; e < grid.elem_count(); ++e) {
    grid.elem_nodes(e, nodes);
    for (int a = 0; a < npe; ++a) {
      for (int b = 0; b < npe; ++b) {
        mt.emplace_back(nodes[a], nodes[b], me(a, b));
        at.emplace_back(nodes[a], nodes[b], me(a, b) + th2 * ke(a, b));
      }
    }
  }
  mass_.resize(grid.node_count(), grid.node_count());
  mass_.setFromTriplets(mt.begin(), mt.end());
  if (tau > 0.0) {
    SpMat A(grid.node_count(), grid.node_count());
    A.setFromTriplets(at.begin(), at.end());
    solver_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>(A);
    if (solver_->info() != Eigen::Success)
      throw InvalidState("Laplacian regularization factorization failed");
  }
}

Eigen::VectorXd NodalLaplacian::regularize_nodal(
    const Eigen::VectorXd& nodal) const {
  if (nodal.size() != grid_.node_count())
    throw InvalidArgument("nodal field size mismatch");
  if (!solver_) return nodal;
  return solver_->solve(mass_ * nodal);
}

Eigen::VectorXd NodalLaplacian::regularize_element(
    const Eigen::VectorXd& elem) const {
  if (elem.size() != grid_.elem_count())
    throw InvalidArgument("element field size mismatch");
  const int npe = grid_.nodes_per_elem();
  const double w = grid_.elem_volume() / npe;  // integral of each N over elem
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(grid_.node_count());
  std::array<int, 8> nodes{};
  for (int e = 0; e < grid_.elem_count(); ++e) {
    grid_.elem_nodes(e, nodes);
    for (int a = 0; a < npe; ++a) rhs[nodes[a]] += w * elem[e];
  }
  if (!solver_) {
    // tau == 0: plain L2 projection, solve M x = rhs
    Eigen::SimplicialLDLT<SpMat> mslv(mass_);
    return mslv.solve(rhs);
  }
  return solver_->solve(rhs);
}

double NodalLaplacian::mass_norm(const Eigen::VectorXd& nodal) const {
  return std::sqrt(nodal.dot(mass_ * nodal));
}

Eigen::VectorXd TemporalAverage::apply(const Eigen::VectorXd& current) {
  if (has_prev_ && prev_.size() != current.size())
    throw InvalidArgument("temporal average shape mismatch");
  Eigen::VectorXd out = has_prev_ ? ((current + prev_) / 2.0).eval() : current;
  prev_ = out;
  has_prev_ = true;
  return out;
}

Eigen::VectorXd element_to_node_average(const Grid& grid,
                                        const Eigen::VectorXd& elem_field) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(grid.node_count());
  Eigen::VectorXd cnt = Eigen::VectorXd::Zero(grid.node_count());
  std::array<int, 8> nodes{};
  const int npe = grid.nodes_per_elem();
  for (int e = 0; e < grid.elem_count(); ++e) {
    grid.elem_nodes(e, nodes);
    for (int a = 0; a < npe; ++a) {
      sum[nodes[a]] += elem_field[e];
      cnt[nodes[a]] += 1.0;
    }
  }
  return sum.cwiseQuotient(cnt);
}

}  // namespace topo
