#include "topo/convergence.hpp"

#include <cmath>
#include <limits>

namespace topo {

std::optional<double> objective_criterion(const std::vector<double>& history,
                                          int n, double J0) {
  if (n < 1) throw InvalidArgument("criterion window must be >= 1");
  if (!(J0 > 0.0)) throw InvalidArgument("J0 must be > 0");
  const int len = static_cast<int>(history.size());
  if (len < n + 1) return std::nullopt;
  double acc = 0.0;
  for (int i = len - n; i < len; ++i)
    acc += std::abs(history[i] - history[i - 1]);
  return acc / (n * J0);
}

double topology_criterion(const Eigen::VectorXd& prev,
                          const Eigen::VectorXd& curr, const Grid& grid,
                          TopologyMode mode, const NodalLaplacian* reg) {
  if (prev.size() != curr.size() || prev.size() != grid.elem_count())
    throw InvalidArgument("topology criterion field size mismatch");
  const double omega0 = grid.total_volume();
  if (mode == TopologyMode::Element) {
    const double ve = grid.elem_volume();
    double acc = 0.0;
    for (int e = 0; e < prev.size(); ++e) {
      const double d = curr[e] - prev[e];
      acc += d * d * ve;
    }
    return std::sqrt(acc / omega0);
  }
  if (!reg) throw InvalidArgument("nodal criterion requires a regularizer");
  const Eigen::VectorXd diff =
      reg->regularize_element(curr) - reg->regularize_element(prev);
  return reg->mass_norm(diff) / std::sqrt(omega0);
}

double volume_schedule(double f0, double fbar, double k, int n_steps, int j) {
  if (k == 0.0) throw InvalidArgument("schedule factor k must be nonzero");
  if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
  if (j < 0 || j > n_steps) throw InvalidArgument("schedule step out of range");
  const double frac = static_cast<double>(j) / n_steps;
  return f0 + (fbar - f0) / (1.0 - std::exp(k)) * (1.0 - std::exp(k * frac));
}

double tolerance_schedule(int j, int n_steps, double tol_final) {
  if (n_steps < 1) throw InvalidArgument("n_steps must be >= 1");
  if (j < 1 || j > n_steps) throw InvalidArgument("schedule step out of range");
  if (n_steps == 1) return tol_final;
  const double t = static_cast<double>(j - 1) / (n_steps - 1);
  return 10.0 * tol_final + t * (tol_final - 10.0 * tol_final);
}

std::optional<OrderFit> order_of_convergence(const std::vector<double>& J_seq,
                                             double J_star, double J0) {
  if (!(J0 > 0.0)) throw InvalidArgument("J0 must be > 0");
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();
  std::vector<double> loge;
  for (double J : J_seq) {
    const double e = std::abs(J / J0 - J_star / J0);
    if (e > floor)
      loge.push_back(std::log(e));
    else
      loge.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  // fit log|e_{n+1}| = p log|e_n| + log mu over consecutive usable pairs
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i + 1 < loge.size(); ++i) {
    if (std::isnan(loge[i]) || std::isnan(loge[i + 1])) continue;
    const double x = loge[i], y = loge[i + 1];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 3) return std::nullopt;
  const double det = m * sxx - sx * sx;
  if (std::abs(det) < 1e-300) return std::nullopt;
  OrderFit fit;
  fit.p = (m * sxy - sx * sy) / det;
  fit.mu = std::exp((sy - fit.p * sx) / m);
  fit.pairs_used = m;
  return fit;
}

}  // namespace topo
