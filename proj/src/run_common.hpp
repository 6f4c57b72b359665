#pragma once

// Internal helpers shared by the optimizer run loops. Not installed.

#include <cmath>
#include <limits>

#include "topo/fem.hpp"
#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo::detail {

// Volume bookkeeping over the designable domain. Passive-void elements are
// excluded from both numerator and denominator; passive-solid elements count
// as permanently stiff.
struct VolumeAccounting {
  std::vector<int> active;       // updatable element ids
  double denom = 0.0;            // non-passive-void volume
  double passive_solid = 0.0;    // fixed stiff volume

  static VolumeAccounting build(const Grid& grid, const DomainMasks& masks) {
    VolumeAccounting a;
    const double ve = grid.elem_volume();
    for (int e = 0; e < grid.elem_count(); ++e) {
      switch (masks.state(e)) {
        case ElemState::Active:
          a.active.push_back(e);
          a.denom += ve;
          break;
        case ElemState::PassiveSolid:
          a.denom += ve;
          a.passive_solid += ve;
          break;
        case ElemState::PassiveVoid:
          break;
      }
    }
    if (a.denom <= 0.0)
      throw InvalidState("domain has no designable or solid volume");
    return a;
  }

  // Stiff fraction of the designable domain for a density-like field that is
  // already mask-consistent (0 on void, 1 on solid).
  double fraction(const Grid& grid, const DomainMasks& masks,
                  const Eigen::VectorXd& rho) const {
    const double ve = grid.elem_volume();
    double stiff = passive_solid;
    for (int e : active) stiff += rho[e] * ve;
    (void)masks;
    return stiff / denom;
  }
};

inline void apply_masks(Eigen::VectorXd& rho, const DomainMasks& masks,
                        double void_val, double solid_val) {
  if (masks.elem_state.empty()) return;
  for (std::size_t e = 0; e < masks.elem_state.size(); ++e) {
    if (masks.elem_state[e] == ElemState::PassiveVoid)
      rho[e] = void_val;
    else if (masks.elem_state[e] == ElemState::PassiveSolid)
      rho[e] = solid_val;
  }
}

// Full-solid reference solve fixing the J0 normalization; passive voids stay
// at the contrast stiffness.
inline double reference_objective(StateEvaluator& eval, const Grid& grid,
                                  const ProblemSpec& prob) {
  Eigen::VectorXd scale =
      Eigen::VectorXd::Ones(grid.elem_count());
  for (int e = 0; e < grid.elem_count(); ++e)
    if (prob.masks.state(e) == ElemState::PassiveVoid)
      scale[e] = prob.material.alpha;
  eval.solve_cases(scale);
  return eval.objective();
}

inline double j0_norm(double J0) {
  const double n = std::abs(J0);
  if (!(n > 0.0)) throw InvalidState("reference objective is zero");
  return n;
}

inline void push_record(RunRecord& rec, int iter, int step, double J, double J0,
                        double vol, double dJ, double dtopo, double lambda) {
  IterationRecord r;
  r.iter = iter;
  r.step = step;
  r.J = J;
  r.J_over_J0 = J / J0;
  r.vol_frac = vol;
  r.dJ_crit = dJ;
  r.dtopo_crit = dtopo;
  r.lambda = lambda;
  rec.history.push_back(r);
}

inline double nan_marker() {
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace topo::detail
