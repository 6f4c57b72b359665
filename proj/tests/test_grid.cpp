#include <doctest.h>

#include <algorithm>
#include <array>

#include "topo/grid.hpp"

using namespace topo;

TEST_CASE("3D grid counts and lexicographic ids") {
  Grid g(2, 3, 4, 0.5);
  CHECK(g.dim() == 3);
  CHECK(g.node_count() == 3 * 4 * 5);
  CHECK(g.elem_count() == 2 * 3 * 4);
  CHECK(g.dof_count() == 60 * 3);
  CHECK(g.elem_volume() == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(g.total_volume() == doctest::Approx(24 * 0.125).epsilon(1e-14));

  CHECK(g.node_id(0, 0, 0) == 0);
  CHECK(g.node_id(1, 2, 3) == 1 + 2 * 3 + 3 * 12);
  CHECK(g.elem_id(1, 2, 3) == 1 + 2 * 2 + 3 * 6);

  auto ijk = g.elem_ijk(g.elem_id(1, 2, 3));
  CHECK(ijk[0] == 1);
  CHECK(ijk[1] == 2);
  CHECK(ijk[2] == 3);
  auto nijk = g.node_ijk(43);
  CHECK(nijk[0] == 1);
  CHECK(nijk[1] == 2);
  CHECK(nijk[2] == 3);
}

TEST_CASE("3D element connectivity, hand enumerated") {
  Grid g(2, 3, 4, 1.0);
  std::array<int, 8> n;
  // first element: bottom face 0,1,4,3 then the same plus one node layer
  g.elem_nodes(0, n);
  CHECK(n == std::array<int, 8>{0, 1, 4, 3, 12, 13, 16, 15});
  // last element, corner (1,2,3)
  g.elem_nodes(g.elem_id(1, 2, 3), n);
  CHECK(n == std::array<int, 8>{43, 44, 47, 46, 55, 56, 59, 58});

  const std::array<int, 8> first{0, 1, 4, 3, 12, 13, 16, 15};
  std::array<int, 24> d;
  g.elem_dofs(0, d);
  for (int a = 0; a < 8; ++a)
    for (int c = 0; c < 3; ++c) CHECK(d[3 * a + c] == 3 * first[a] + c);
}

TEST_CASE("2D grid degenerates to quads") {
  Grid g(2, 3, 0, 2.0);
  CHECK(g.dim() == 2);
  CHECK(g.nodes_per_elem() == 4);
  CHECK(g.dof_per_node() == 2);
  CHECK(g.node_count() == 3 * 4);
  CHECK(g.elem_count() == 6);
  CHECK(g.elem_volume() == doctest::Approx(4.0).epsilon(1e-14));

  std::array<int, 8> n;
  g.elem_nodes(g.elem_id(1, 2, 0), n);
  CHECK(n[0] == 1 + 2 * 3);
  CHECK(n[1] == 2 + 2 * 3);
  CHECK(n[2] == 2 + 3 * 3);
  CHECK(n[3] == 1 + 3 * 3);

  std::array<int, 24> d;
  g.elem_dofs(0, d);
  CHECK(d[0] == 0);
  CHECK(d[1] == 1);
  CHECK(d[2] == 2);
  CHECK(d[3] == 3);
  CHECK(d[4] == 2 * 4);  // node 4 = (1,1)
  CHECK(d[5] == 2 * 4 + 1);
}

TEST_CASE("coordinates follow indices times spacing") {
  Grid g(3, 2, 2, 0.25);
  auto c = g.node_coord(g.node_id(2, 1, 2));
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c[2] == doctest::Approx(0.5).epsilon(1e-14));
  auto e = g.elem_center(g.elem_id(0, 0, 0));
  CHECK(e[0] == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("region selectors") {
  Grid g(2, 2, 2, 1.0);

  auto left = select(g, RegionSelector::plane(0, 0.0, RegionSelector::Target::Nodes));
  CHECK(left.size() == 9);
  for (int n : left) CHECK(g.node_ijk(n)[0] == 0);
  CHECK(std::is_sorted(left.begin(), left.end()));

  auto box = select(g, RegionSelector::box({0, 0, 0}, {1.0, 1.0, 1.0},
                                           RegionSelector::Target::Elements));
  // element centers at 0.5 or 1.5 per axis: only (0,0,0) fits the unit box
  CHECK(box == std::vector<int>{0});

  auto near = select(g, RegionSelector::near_point({2.0, 2.0, 2.0}, 0.1,
                                                   RegionSelector::Target::Nodes));
  CHECK(near == std::vector<int>{g.node_id(2, 2, 2)});
}

TEST_CASE("grid rejects bad arguments") {
  CHECK_THROWS_AS(Grid(0, 1, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(1, 1, 1, 0.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(1, 0, 2, 1.0), InvalidArgument);
}
