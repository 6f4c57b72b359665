#pragma once

#include <map>
#include <string>
#include <vector>

#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

enum class CaseName { Cantilever, LShape, MultiLoadCantilever, Gripper };

const char* case_name(CaseName c);
bool case_from_name(const std::string& name, CaseName& out);

struct BuiltCase {
  Grid grid;
  ProblemSpec problem;
  std::map<Method, MethodConfig> configs;  // one tuned bundle per method
  CaseName name = CaseName::Cantilever;
  double scale = 1.0;
};

/// Wires one of the four benchmark problems at a resolution scale in (0, 1].
/// Scale 1.0 reproduces the reference grids (50x200x100, 30x180x180,
/// 50x200x100, quarter gripper 50x200x100). Scales that misalign a load or a
/// passive region with the mesh raise invalid-argument naming the nearest
/// valid scale.
BuiltCase build_case(CaseName name, double scale);

/// Planar desk-scale twin used by the verification suites (cantilever and
/// multi-load only): length 2:1 domain, left face fixed, corner loads.
/// `scale` multiplies the 48x24 baseline.
BuiltCase build_case_2d(CaseName name, double scale);

struct QualityReport {
  double J_blackwhite = 0.0;
  double mean_bar_width = 0.0;
  int iteration_count = 0;
  double volume_fraction_final = 0.0;
};

struct ProjectionResult {
  std::vector<double> binary;  // element field in {0, 1}
  double J_bw = 0.0;
  double threshold = 0.0;
};

/// Thresholds the converged design to a black-and-white layout holding the
/// stiff volume fixed (ties broken by element index), then re-solves the
/// state once at contrast 1e-9 for the equivalent objective value.
ProjectionResult postprocess_projection(const std::vector<double>& design,
                                        Method method, const Grid& grid,
                                        const ProblemSpec& prob);

/// Stiff volume over solid/void interface area. Domain-boundary faces do not
/// count as interface. All-solid designs report infinity.
double mean_bar_width(const std::vector<double>& binary, const Grid& grid);

}  // namespace topo
