#pragma once

#include <Eigen/Dense>

#include "topo/fem.hpp"
#include "topo/types.hpp"

namespace topo {

/// Objective value from solved states (delegates to the evaluator; kept as a
/// named entry point so callers do not reach into fem internals).
double objective(const StateEvaluator& state);

/// Combined energy-like field for the problem kind:
///   MinCompliance: u^T K_e^+ u
///   MultiLoad:     sum_i u^(i)T K_e^+ u^(i)
///   Mechanism:     u^(1)T K_e^+ u^(2)
Eigen::VectorXd objective_energy(const StateEvaluator& state);

/// dJ/drho_e for the SIMP interpolation, omega_e = p rho^(p-1) (1 - alpha).
/// Compliance-type objectives give values <= 0, mechanism gives +omega * e12.
Eigen::VectorXd simp_sensitivity(const StateEvaluator& state,
                                 const Eigen::VectorXd& rho, double p,
                                 double alpha);

/// dJ/drho_e for the BESO interpolation, omega_e = p rho^(p-1).
Eigen::VectorXd beso_sensitivity(const StateEvaluator& state,
                                 const Eigen::VectorXd& rho, double p);

/// Relaxed-topological-derivative pseudo-energy xi, omega = m chi^(m-1)(1-beta)
/// with beta = alpha^(1/m). Compliance kinds are >= 0; mechanism carries the
/// negative product form.
Eigen::VectorXd vartop_pseudo_energy(const StateEvaluator& state,
                                     const Eigen::VectorXd& chi, double m_exp,
                                     double beta);

/// Shift/normalization state, frozen at the first optimization iteration:
/// shift = min(xi_0, 0), norm = max(range(xi_0), max(xi_0)).
struct ShiftNormState {
  bool frozen = false;
  double shift = 0.0;
  double norm = 1.0;

  void freeze_from(const Eigen::VectorXd& xi0);
};

/// xi_hat = (xi - chi * shift) / norm.
Eigen::VectorXd shift_normalize(const Eigen::VectorXd& xi,
                                const Eigen::VectorXd& chi,
                                const ShiftNormState& state);

}  // namespace topo
