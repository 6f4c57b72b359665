#include "topo/grid.hpp"

#include <algorithm>
#include <cmath>

namespace topo {

const char* method_name(Method m) {
  switch (m) {
    case Method::SimpI: return "simp_i";
    case Method::SimpII: return "simp_ii";
    case Method::SimpIII: return "simp_iii";
    case Method::Beso: return "beso";
    case Method::Vartop: return "vartop";
    case Method::Levelset: return "levelset";
  }
  return "?";
}

bool method_from_name(const std::string& name, Method& out) {
  for (Method m : {Method::SimpI, Method::SimpII, Method::SimpIII, Method::Beso,
                   Method::Vartop, Method::Levelset}) {
    if (name == method_name(m)) {
      out = m;
      return true;
    }
  }
  return false;
}

Grid::Grid(int nx, int ny, int nz, double elem_size)
    : nx_(nx), ny_(ny), nz_(nz), h_(elem_size) {
  if (nx < 1 || ny < 1 || nz < 0)
    throw InvalidArgument("grid dimensions must be >= 1 (nz == 0 for 2D)");
  if (!(elem_size > 0.0)) throw InvalidArgument("elem_size must be > 0");
  const std::int64_t nzn = nz_ == 0 ? 1 : nz_ + 1;
  node_count_ = static_cast<std::int64_t>(nx_ + 1) * (ny_ + 1) * nzn;
  elem_count_ = static_cast<std::int64_t>(nx_) * ny_ * (nz_ == 0 ? 1 : nz_);
}

double Grid::elem_volume() const { return dim() == 2 ? h_ * h_ : h_ * h_ * h_; }

double Grid::total_volume() const {
  return static_cast<double>(elem_count_) * elem_volume();
}

int Grid::node_id(int i, int j, int k) const {
  return i + j * (nx_ + 1) + k * (nx_ + 1) * (ny_ + 1);
}

int Grid::elem_id(int i, int j, int k) const {
  return i + j * nx_ + k * nx_ * ny_;
}

std::array<int, 3> Grid::elem_ijk(int e) const {
  const int i = e % nx_;
  const int j = (e / nx_) % ny_;
  const int k = e / (nx_ * ny_);
  return {i, j, k};
}

std::array<int, 3> Grid::node_ijk(int n) const {
  const int sx = nx_ + 1, sy = ny_ + 1;
  const int i = n % sx;
  const int j = (n / sx) % sy;
  const int k = n / (sx * sy);
  return {i, j, k};
}

void Grid::elem_nodes(int e, std::array<int, 8>& nodes) const {
  const auto [i, j, k] = elem_ijk(e);
  nodes[0] = node_id(i, j, k);
  nodes[1] = node_id(i + 1, j, k);
  nodes[2] = node_id(i + 1, j + 1, k);
  nodes[3] = node_id(i, j + 1, k);
  if (dim() == 3) {
    nodes[4] = node_id(i, j, k + 1);
    nodes[5] = node_id(i + 1, j, k + 1);
    nodes[6] = node_id(i + 1, j + 1, k + 1);
    nodes[7] = node_id(i, j + 1, k + 1);
  } else {
    nodes[4] = nodes[5] = nodes[6] = nodes[7] = -1;
  }
}

void Grid::elem_dofs(int e, std::array<int, 24>& dofs) const {
  std::array<int, 8> nodes;
  elem_nodes(e, nodes);
  const int d = dof_per_node();
  const int npe = nodes_per_elem();
  for (int a = 0; a < npe; ++a)
    for (int c = 0; c < d; ++c) dofs[a * d + c] = nodes[a] * d + c;
}

std::array<double, 3> Grid::node_coord(int n) const {
  const auto [i, j, k] = node_ijk(n);
  return {i * h_, j * h_, k * h_};
}

std::array<double, 3> Grid::elem_center(int e) const {
  const auto [i, j, k] = elem_ijk(e);
  const double zc = dim() == 2 ? 0.0 : (k + 0.5) * h_;
  return {(i + 0.5) * h_, (j + 0.5) * h_, zc};
}

RegionSelector RegionSelector::box(std::array<double, 3> lo,
                                   std::array<double, 3> hi, Target t) {
  RegionSelector s;
  s.kind = Kind::Box;
  s.target = t;
  s.lo = lo;
  s.hi = hi;
  return s;
}

RegionSelector RegionSelector::plane(int axis, double value, Target t) {
  RegionSelector s;
  s.kind = Kind::Plane;
  s.target = t;
  s.axis = axis;
  s.value = value;
  return s;
}

RegionSelector RegionSelector::near_point(std::array<double, 3> p, double r,
                                          Target t) {
  RegionSelector s;
  s.kind = Kind::PointRadius;
  s.target = t;
  s.point = p;
  s.radius = r;
  return s;
}

std::vector<int> select(const Grid& grid, const RegionSelector& sel) {
  const double tol = 1e-9 * grid.h();
  const bool nodes = sel.target == RegionSelector::Target::Nodes;
  const std::int64_t count = nodes ? grid.node_count() : grid.elem_count();

  auto coord = [&](int idx) {
    return nodes ? grid.node_coord(idx) : grid.elem_center(idx);
  };
  auto inside = [&](const std::array<double, 3>& c) {
    switch (sel.kind) {
      case RegionSelector::Kind::Box:
        for (int a = 0; a < grid.dim(); ++a)
          if (c[a] < sel.lo[a] - tol || c[a] > sel.hi[a] + tol) return false;
        return true;
      case RegionSelector::Kind::Plane:
        return std::abs(c[sel.axis] - sel.value) <= tol;
      case RegionSelector::Kind::PointRadius: {
        double d2 = 0;
        for (int a = 0; a < grid.dim(); ++a) {
          const double d = c[a] - sel.point[a];
          d2 += d * d;
        }
        return d2 <= (sel.radius + tol) * (sel.radius + tol);
      }
    }
    return false;
  };

  std::vector<int> out;
  for (int idx = 0; idx < count; ++idx)
    if (inside(coord(idx))) out.push_back(idx);
  return out;  // index scan order is already sorted and unique
}

}  // namespace topo
