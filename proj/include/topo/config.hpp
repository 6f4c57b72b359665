#pragma once

#include <map>
#include <string>
#include <vector>

#include "topo/bench.hpp"
#include "topo/types.hpp"

namespace topo {

/// One run request: a benchmark case, a method selection, and optional
/// parameter overrides on top of the published defaults. Serialized as JSON
/// with a schema_version key; unknown keys are rejected.
struct RunConfig {
  int schema_version = 1;
  CaseName case_name = CaseName::Cantilever;
  double scale = 0.12;
  bool two_d = false;  // use the planar desk-scale twin
  std::vector<Method> methods;
  std::string out_dir = "out";
  bool allow_large = false;
  int parallel = 1;
  unsigned seed = 0;  // reserved; no algorithm consumes randomness
  bool export_fields = true;
  bool export_histories = true;
  std::map<std::string, double> overrides;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& json_text);
std::string serialize_config(const RunConfig& cfg);

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

/// Applies named parameter overrides (p, move, eta, er, ar_max, m_exp, tau,
/// dt, s_penalty, kappa, relax, r_min, n_steps, k_factor, tol_volume, tol_J,
/// tol_topology, window, max_iters, max_iters_per_step, solver_rel_tol).
/// Unknown names are rejected.
void apply_overrides(MethodConfig& mc,
                     const std::map<std::string, double>& overrides);

}  // namespace topo
