#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "topo/types.hpp"

namespace topo {

/// Structured hexahedral grid (degenerate 2D quad grid when nz == 0).
///
/// Numbering is lexicographic with x fastest:
///   node(i,j,k)    = i + j*(nx+1) + k*(nx+1)*(ny+1)
///   element(i,j,k) = i + j*nx     + k*nx*ny
///
/// Element-local node order follows the standard trilinear hex convention,
/// bottom face counter-clockwise then top face:
///
///        7--------6            z  y
///       /|       /|            | /
///      4--------5 |            |/
///      | 3------|-2            +---- x
///      |/       |/
///      0--------1
///
///   0:(i,j,k)   1:(i+1,j,k)   2:(i+1,j+1,k)   3:(i,j+1,k)
///   4:(i,j,k+1) 5:(i+1,j,k+1) 6:(i+1,j+1,k+1) 7:(i,j+1,k+1)
///
/// In 2D only nodes 0..3 exist. This order fixes the row/column convention of
/// the element stiffness matrix (dofs grouped per node, x then y then z).
/// Coordinates are computed from indices, never stored.
class Grid {
 public:
  Grid(int nx, int ny, int nz, double elem_size);  // nz == 0 selects 2D mode

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double h() const { return h_; }
  int dim() const { return nz_ == 0 ? 2 : 3; }
  int nodes_per_elem() const { return dim() == 2 ? 4 : 8; }
  int dof_per_node() const { return dim(); }

  std::int64_t node_count() const { return node_count_; }
  std::int64_t elem_count() const { return elem_count_; }
  std::int64_t dof_count() const { return node_count_ * dof_per_node(); }

  double elem_volume() const;   // h^dim
  double total_volume() const;  // elem_count * elem_volume

  int node_id(int i, int j, int k) const;
  int elem_id(int i, int j, int k) const;
  std::array<int, 3> elem_ijk(int e) const;
  std::array<int, 3> node_ijk(int n) const;

  void elem_nodes(int e, std::array<int, 8>& nodes) const;
  /// Element dofs in local-node order, dof_per_node consecutive per node.
  void elem_dofs(int e, std::array<int, 24>& dofs) const;

  std::array<double, 3> node_coord(int n) const;
  std::array<double, 3> elem_center(int e) const;

 private:
  int nx_, ny_, nz_;
  double h_;
  std::int64_t node_count_, elem_count_;
};

inline Grid build_grid(int nx, int ny, int nz, double elem_size) {
  return Grid(nx, ny, nz, elem_size);
}

struct RegionSelector {
  enum class Kind { Box, Plane, PointRadius };
  enum class Target { Nodes, Elements };

  Kind kind = Kind::Box;
  Target target = Target::Nodes;

  // Box: closed interval [lo, hi] per axis (element selection tests centers).
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{0, 0, 0};

  // Plane: axis-aligned, coordinate[axis] == value.
  int axis = 0;
  double value = 0.0;

  // PointRadius: within radius of point.
  std::array<double, 3> point{0, 0, 0};
  double radius = 0.0;

  static RegionSelector box(std::array<double, 3> lo, std::array<double, 3> hi,
                            Target t);
  static RegionSelector plane(int axis, double value, Target t);
  static RegionSelector near_point(std::array<double, 3> p, double r, Target t);
};

/// Sorted, duplicate-free indices of nodes or elements inside the selector.
/// Bounds are closed intervals with tolerance 1e-9 * elem_size.
std::vector<int> select(const Grid& grid, const RegionSelector& sel);

}  // namespace topo
