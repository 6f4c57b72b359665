#include "topo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace topo {

namespace {

std::string fmt(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

[[noreturn]] void io_fail(const std::string& what, const std::string& path) {
  throw InvalidState(what + ": " + path);
}

}  // namespace

void export_history(const RunRecord& rec, const std::string& path) {
  if (rec.history.empty()) throw InvalidArgument("empty run record");
  std::ofstream out(path, std::ios::binary);  // binary keeps LF on any host
  if (!out) io_fail("cannot open history file for writing", path);
  out << "iter,step,J,J_over_J0,vol_frac,dJ_crit,dtopo_crit,lambda\n";
  for (const auto& r : rec.history) {
    out << r.iter << ',' << r.step << ',' << fmt(r.J, 17) << ','
        << fmt(r.J_over_J0, 17) << ',' << fmt(r.vol_frac, 17) << ','
        << fmt(r.dJ_crit, 17) << ',' << fmt(r.dtopo_crit, 17) << ','
        << fmt(r.lambda, 17) << '\n';
  }
  if (!out) io_fail("write failed", path);
}

std::vector<IterationRecord> read_history(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open history file", path);
  std::string line;
  if (!std::getline(in, line)) io_fail("empty history file", path);
  std::vector<IterationRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) io_fail("malformed history row", path);
    IterationRecord r;
    r.iter = std::stoi(cells[0]);
    r.step = std::stoi(cells[1]);
    r.J = std::stod(cells[2]);
    r.J_over_J0 = std::stod(cells[3]);
    r.vol_frac = std::stod(cells[4]);
    r.dJ_crit = cells[5] == "nan" ? NAN : std::stod(cells[5]);
    r.dtopo_crit = cells[6] == "nan" ? NAN : std::stod(cells[6]);
    r.lambda = std::stod(cells[7]);
    out.push_back(r);
  }
  return out;
}

void export_field(const std::vector<double>& field, FieldKind kind,
                  const Grid& grid, const std::string& name,
                  const std::string& path) {
  const std::int64_t expect = kind == FieldKind::Element ? grid.elem_count()
                                                         : grid.node_count();
  if (static_cast<std::int64_t>(field.size()) != expect)
    throw InvalidArgument("field size does not match the grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail("cannot open field file for writing", path);
  const int pz = grid.dim() == 3 ? grid.nz() + 1 : 1;
  out << "# vtk DataFile Version 3.0\n"
      << name << "\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_POINTS\n"
      << "DIMENSIONS " << grid.nx() + 1 << ' ' << grid.ny() + 1 << ' ' << pz
      << "\n"
      << "ORIGIN 0 0 0\n"
      << "SPACING " << fmt(grid.h(), 9) << ' ' << fmt(grid.h(), 9) << ' '
      << fmt(grid.h(), 9) << "\n";
  out << (kind == FieldKind::Element ? "CELL_DATA " : "POINT_DATA ")
      << field.size() << "\n"
      << "SCALARS " << name << " double 1\n"
      << "LOOKUP_TABLE default\n";
  for (double v : field) out << fmt(v, 9) << '\n';
  if (!out) io_fail("write failed", path);
}

VtkField read_vtk_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open field file", path);
  VtkField f;
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (tok == "DIMENSIONS") {
      ss >> f.dims[0] >> f.dims[1] >> f.dims[2];
    } else if (tok == "CELL_DATA" || tok == "POINT_DATA") {
      f.kind = tok == "CELL_DATA" ? FieldKind::Element : FieldKind::Nodal;
      ss >> count;
    } else if (tok == "SCALARS") {
      ss >> f.name;
      std::getline(in, line);  // LOOKUP_TABLE
      f.values.reserve(count);
      double v;
      while (f.values.size() < count && in >> v) f.values.push_back(v);
    }
  }
  if (f.values.size() != count) io_fail("truncated field file", path);
  return f;
}

}  // namespace topo
