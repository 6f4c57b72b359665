#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "topo/filters.hpp"
#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

/// Moving mean of relative objective changes over the last n pairs:
/// (1/n) sum_{i=k-n+1..k} |J_i - J_{i-1}| / J0, evaluated at the newest entry.
/// `history` holds the J values of the current time-step only. Returns empty
/// when fewer than n+1 in-step values exist (criterion not yet evaluable).
std::optional<double> objective_criterion(const std::vector<double>& history,
                                          int n, double J0);

enum class TopologyMode { Element, Nodal };

/// Design-change norm between consecutive iterates.
/// Element mode: (1/sqrt(|Omega0|)) * sqrt(sum (d rho_e)^2 |Omega_e|).
/// Nodal mode: each element field is pushed through the screened nodal
/// regularization (the `reg` operator, built with tau = tau_criterion), then
/// the mass-matrix L2 norm of the nodal difference is normalized the same way.
/// `reg` may be null in element mode.
double topology_criterion(const Eigen::VectorXd& prev,
                          const Eigen::VectorXd& curr, const Grid& grid,
                          TopologyMode mode,
                          const NodalLaplacian* reg = nullptr);

/// Exponential intermediate volume fractions, f_j = f0 +
/// (fbar - f0)/(1 - e^k) * (1 - e^{k j / n_steps}). j = 0 gives f0, j = n_steps
/// gives fbar. k must be nonzero.
double volume_schedule(double f0, double fbar, double k, int n_steps, int j);

/// Per-step tolerance relaxation: linear from 10*tol_final at step 1 down to
/// tol_final at step n_steps. n_steps == 1 gives tol_final.
double tolerance_schedule(int j, int n_steps, double tol_final);

struct OrderFit {
  double p = 0.0;
  double mu = 0.0;
  int pairs_used = 0;
};

/// Least-squares fit of log|e_{n+1}| = p log|e_n| + log mu where
/// e_n = J_n/J0 - J_star/J0. Entries with |e| <= 100*eps are dropped.
/// Returns empty when fewer than 3 usable pairs remain.
std::optional<OrderFit> order_of_convergence(const std::vector<double>& J_seq,
                                             double J_star, double J0);

}  // namespace topo
