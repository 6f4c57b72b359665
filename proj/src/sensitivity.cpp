#include "topo/sensitivity.hpp"

#include <cmath>

namespace topo {

double objective(const StateEvaluator& state) { return state.objective(); }

Eigen::VectorXd objective_energy(const StateEvaluator& state) {
  switch (state.problem().objective) {
    case Objective::MinCompliance:
      return state.energy(0, 0);
    case Objective::MultiLoad: {
      Eigen::VectorXd acc = state.energy(0, 0);
      for (int i = 1; i < state.case_count(); ++i) acc += state.energy(i, i);
      return acc;
    }
    case Objective::Mechanism:
      return state.energy(0, 1);
  }
  return {};
}

namespace {

Eigen::VectorXd density_sensitivity(const StateEvaluator& state,
                                    const Eigen::VectorXd& omega) {
  const Eigen::VectorXd e = objective_energy(state);
  // compliance kinds: dJ/drho = -omega * e; mechanism: +omega * e12
  const double sign =
      state.problem().objective == Objective::Mechanism ? 1.0 : -1.0;
  return sign * omega.cwiseProduct(e);
}

}  // namespace

Eigen::VectorXd simp_sensitivity(const StateEvaluator& state,
                                 const Eigen::VectorXd& rho, double p,
                                 double alpha) {
  Eigen::VectorXd omega(rho.size());
  for (int e = 0; e < rho.size(); ++e)
    omega[e] = p * std::pow(rho[e], p - 1.0) * (1.0 - alpha);
  return density_sensitivity(state, omega);
}

Eigen::VectorXd beso_sensitivity(const StateEvaluator& state,
                                 const Eigen::VectorXd& rho, double p) {
  Eigen::VectorXd omega(rho.size());
  for (int e = 0; e < rho.size(); ++e) omega[e] = p * std::pow(rho[e], p - 1.0);
  return density_sensitivity(state, omega);
}

Eigen::VectorXd vartop_pseudo_energy(const StateEvaluator& state,
                                     const Eigen::VectorXd& chi, double m_exp,
                                     double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must be in (0,1)");
  const Eigen::VectorXd e = objective_energy(state);
  const double sign =
      state.problem().objective == Objective::Mechanism ? -1.0 : 1.0;
  Eigen::VectorXd xi(chi.size());
  for (int i = 0; i < chi.size(); ++i) {
    const double omega = m_exp * std::pow(chi[i], m_exp - 1.0) * (1.0 - beta);
    xi[i] = sign * omega * e[i];
  }
  return xi;
}

void ShiftNormState::freeze_from(const Eigen::VectorXd& xi0) {
  const double lo = xi0.minCoeff();
  const double hi = xi0.maxCoeff();
  shift = std::min(lo, 0.0);
  norm = std::max(hi - lo, hi);
  frozen = true;
  if (!(norm > 0.0))
    throw InvalidState("degenerate pseudo-energy normalization (all-zero xi)");
}

Eigen::VectorXd shift_normalize(const Eigen::VectorXd& xi,
                                const Eigen::VectorXd& chi,
                                const ShiftNormState& state) {
  if (!state.frozen) throw InvalidState("shift/norm state not frozen yet");
  return (xi - state.shift * chi) / state.norm;
}

}  // namespace topo
