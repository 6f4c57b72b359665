#pragma once

#include <string>
#include <vector>

#include "topo/grid.hpp"
#include "topo/types.hpp"

namespace topo {

/// Writes the iteration history as CSV with header
/// iter,step,J,J_over_J0,vol_frac,dJ_crit,dtopo_crit,lambda.
/// LF line endings; doubles printed with 17 significant digits so values
/// round-trip exactly; unavailable criteria serialize as "nan".
void export_history(const RunRecord& rec, const std::string& path);

/// Reads a history CSV written by export_history.
std::vector<IterationRecord> read_history(const std::string& path);

enum class FieldKind { Element, Nodal };

/// Legacy-VTK ASCII structured-points export. Element fields go to CELL_DATA,
/// nodal fields to POINT_DATA; values use 9 significant digits.
void export_field(const std::vector<double>& field, FieldKind kind,
                  const Grid& grid, const std::string& name,
                  const std::string& path);

struct VtkField {
  std::vector<double> values;
  FieldKind kind = FieldKind::Element;
  std::string name;
  std::array<int, 3> dims{};  // point dimensions as written
};

/// Parses a file written by export_field (round-trip check helper).
VtkField read_vtk_field(const std::string& path);

}  // namespace topo
