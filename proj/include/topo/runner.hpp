#pragma once

#include <string>
#include <vector>

#include "topo/bench.hpp"
#include "topo/config.hpp"
#include "topo/types.hpp"

namespace topo {

/// Dispatches to the optimizer matching cfg.method.
RunRecord run_method(const Grid& grid, const ProblemSpec& prob,
                     const MethodConfig& cfg);

struct MethodOutcome {
  Method method = Method::SimpI;
  RunRecord record;
  QualityReport quality;
  bool ok = false;        // run finished without an abort
  std::string error;      // abort reason when !ok
  std::string history_path, field_path, nodal_path, binary_path;
};

struct RunSummary {
  std::vector<MethodOutcome> outcomes;
  std::string summary_csv_path, summary_txt_path;
};

/// Executes every selected method on the configured case and writes the
/// artifacts (per-method history CSV, design fields, projected binary design,
/// summary table as CSV and aligned text, plus the config manifest) under
/// cfg.out_dir. Methods run in up to cfg.parallel threads. Grids above the
/// desk-scale budget require cfg.allow_large.
RunSummary run_all(const RunConfig& cfg);

/// True when at least one method finished cleanly.
bool any_ok(const RunSummary& s);

}  // namespace topo
