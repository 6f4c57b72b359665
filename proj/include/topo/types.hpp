#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace topo {

/// Objective families supported by every optimizer.
enum class Objective { MinCompliance, MultiLoad, Mechanism };

/// The six method variants under comparison.
enum class Method { SimpI, SimpII, SimpIII, Beso, Vartop, Levelset };

const char* method_name(Method m);
bool method_from_name(const std::string& name, Method& out);

struct ElasticMaterial {
  double E = 1.0;       // stiff-phase Young's modulus
  double nu = 0.3;      // Poisson ratio
  double alpha = 1e-6;  // soft/stiff stiffness contrast, 0 < alpha < 1
};

struct LoadCase {
  std::vector<std::pair<int, double>> forces;  // (dof, value), sparse
  std::string label;
};

struct SpringSet {
  std::vector<std::pair<int, double>> entries;  // (dof, stiffness), lumped
  bool empty() const { return entries.empty(); }
};

/// Element classification for passive regions.
enum class ElemState : std::uint8_t { Active = 0, PassiveVoid = 1, PassiveSolid = 2 };

struct DomainMasks {
  std::vector<ElemState> elem_state;  // sized to elem_count; empty = all active
  std::vector<int> fixed_dofs;        // sorted, unique

  ElemState state(std::size_t e) const {
    return elem_state.empty() ? ElemState::Active : elem_state[e];
  }
};

struct ProblemSpec {
  Objective objective = Objective::MinCompliance;
  std::vector<LoadCase> loads;  // Mechanism: loads[0] actuation, loads[1] dummy output
  SpringSet springs;            // port springs, entering K for every state solve
  DomainMasks masks;
  ElasticMaterial material;
  double target_fraction = 0.1;  // stiff volume fraction of the active domain
};

/// Per-method parameters. Defaults follow the benchmark parameter tables for
/// the cantilever compliance case; bench::build_case rewires them per case.
struct MethodConfig {
  Method method = Method::SimpI;

  // density updates (SIMP / BESO)
  double p = 3.0;
  double move = 0.2;
  double eta = 0.5;
  double er = 0.01;      // evolutionary volume ratio
  double ar_max = 0.1;   // max volume addition ratio

  // characteristic-function updates (VARTOP / Level-set)
  double m_exp = 3.0;    // interpolation exponent
  double tau = 1.0;      // Laplacian regularization parameter
  double dt = 0.1;       // Hamilton-Jacobi pseudo-time step
  double s_penalty = 1e-4;
  double kappa = 1.0;
  double relax = 0.5;    // damping of the cutting update on psi

  // spatial filtering
  double r_min = 3.0;    // in element-size units

  // time-advancing schedule
  int n_steps = 1;
  double k_factor = -2.0;

  // convergence protocol
  double tol_volume = 1e-3;
  double tol_J = 1e-3;
  double tol_topology = 2.5e-3;
  int window = 3;
  bool use_objective_criterion = true;  // disabled for mechanism problems
  double tau_criterion = 8.0;

  // run limits
  int max_iters = 3000;
  int max_iters_per_step = 600;
  double solver_rel_tol = 1e-8;
};

struct IterationRecord {
  int iter = 0;
  int step = 0;
  double J = 0.0;
  double J_over_J0 = 0.0;
  double vol_frac = 0.0;
  double dJ_crit = 0.0;     // NaN until evaluable
  double dtopo_crit = 0.0;  // NaN until evaluable
  double lambda = 0.0;
};

struct RunRecord {
  Method method = Method::SimpI;
  std::vector<IterationRecord> history;
  double J0 = 0.0;
  bool converged = false;
  std::string failure;  // nonempty on abort, history then holds the partial record
  std::vector<int> converged_steps;  // time-step indices that met their criteria

  // final design: element densities/characteristic factors, always present
  std::vector<double> final_element_field;
  // nodal discrimination/level-set values (VARTOP / Level-set only)
  std::vector<double> final_nodal_field;
};

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidState : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& msg, double residual)
      : std::runtime_error(msg), residual(residual) {}
  double residual;
};

}  // namespace topo
