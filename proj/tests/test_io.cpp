#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "topo/grid.hpp"
#include "topo/io.hpp"

using namespace topo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("topo_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

RunRecord sample_record() {
  RunRecord rec;
  rec.method = Method::SimpI;
  rec.J0 = 7.0;
  IterationRecord r0;
  r0.iter = 0;
  r0.J = 7.0;
  r0.J_over_J0 = 1.0;
  r0.vol_frac = 1.0;
  r0.dJ_crit = std::nan("");
  r0.dtopo_crit = std::nan("");
  rec.history.push_back(r0);
  IterationRecord r1;
  r1.iter = 1;
  r1.step = 1;
  r1.J = 0.1 + 0.2;  // a value without an exact binary representation
  r1.J_over_J0 = r1.J / 7.0;
  r1.vol_frac = 0.55;
  r1.dJ_crit = 1.2345678901234567e-3;
  r1.dtopo_crit = 9.876543210987654e-4;
  r1.lambda = 1234.5678901234567;
  rec.history.push_back(r1);
  return rec;
}

}  // namespace

TEST_CASE("history CSV round-trips exactly, including nan criteria") {
  TempDir tmp;
  RunRecord rec = sample_record();
  const std::string path = tmp.file("hist.csv");
  export_history(rec, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iter,step,J,J_over_J0,vol_frac,dJ_crit,dtopo_crit,lambda");

  auto rows = read_history(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].iter == 0);
  CHECK(rows[0].J_over_J0 == 1.0);
  CHECK(std::isnan(rows[0].dJ_crit));
  CHECK(std::isnan(rows[0].dtopo_crit));
  CHECK(rows[1].J == rec.history[1].J);  // bitwise round-trip
  CHECK(rows[1].dJ_crit == rec.history[1].dJ_crit);
  CHECK(rows[1].dtopo_crit == rec.history[1].dtopo_crit);
  CHECK(rows[1].lambda == rec.history[1].lambda);
  CHECK(rows[1].step == 1);
}

TEST_CASE("history export uses LF line endings") {
  TempDir tmp;
  const std::string path = tmp.file("hist.csv");
  export_history(sample_record(), path);
  std::ifstream in(path, std::ios::binary);
  std::string all((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  CHECK(all.find('\r') == std::string::npos);
}

TEST_CASE("element field VTK round-trip") {
  TempDir tmp;
  Grid g(3, 2, 2, 0.5);
  std::vector<double> field(g.elem_count());
  for (int e = 0; e < g.elem_count(); ++e) field[e] = 0.1 * e + 0.05;

  const std::string path = tmp.file("design.vtk");
  export_field(field, FieldKind::Element, g, "density", path);
  VtkField back = read_vtk_field(path);
  CHECK(back.kind == FieldKind::Element);
  CHECK(back.name == "density");
  CHECK(back.dims == std::array<int, 3>{4, 3, 3});  // point dims
  REQUIRE(back.values.size() == field.size());
  for (std::size_t e = 0; e < field.size(); ++e)
    CHECK(back.values[e] == doctest::Approx(field[e]).epsilon(1e-8));
}

TEST_CASE("nodal field VTK round-trip carries point data") {
  TempDir tmp;
  Grid g(2, 2, 0, 1.0);
  std::vector<double> psi(g.node_count());
  for (int n = 0; n < g.node_count(); ++n) psi[n] = std::sin(0.7 * n);

  const std::string path = tmp.file("psi.vtk");
  export_field(psi, FieldKind::Nodal, g, "psi", path);
  VtkField back = read_vtk_field(path);
  CHECK(back.kind == FieldKind::Nodal);
  REQUIRE(back.values.size() == static_cast<std::size_t>(g.node_count()));
  for (std::size_t n = 0; n < psi.size(); ++n)
    CHECK(back.values[n] == doctest::Approx(psi[n]).epsilon(1e-8));
}

TEST_CASE("single-element export writes one cell value") {
  TempDir tmp;
  Grid g(1, 1, 1, 1.0);
  const std::string path = tmp.file("one.vtk");
  export_field({0.5}, FieldKind::Element, g, "rho", path);
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  CHECK(all.find("CELL_DATA 1") != std::string::npos);
  VtkField back = read_vtk_field(path);
  REQUIRE(back.values.size() == 1);
  CHECK(back.values[0] == doctest::Approx(0.5));
}

TEST_CASE("io errors surface the path") {
  RunRecord rec = sample_record();
  CHECK_THROWS(export_history(rec, "/nonexistent_dir_xyz/h.csv"));
  CHECK_THROWS(read_history("/nonexistent_dir_xyz/h.csv"));
  CHECK_THROWS(read_vtk_field("/nonexistent_dir_xyz/f.vtk"));
}
