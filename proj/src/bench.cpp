#include "topo/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "run_common.hpp"
#include "topo/fem.hpp"

namespace topo {

const char* case_name(CaseName c) {
  switch (c) {
    case CaseName::Cantilever: return "cantilever";
    case CaseName::LShape: return "lshape";
    case CaseName::MultiLoadCantilever: return "multiload";
    case CaseName::Gripper: return "gripper";
  }
  return "?";
}

bool case_from_name(const std::string& name, CaseName& out) {
  for (CaseName c : {CaseName::Cantilever, CaseName::LShape,
                     CaseName::MultiLoadCantilever, CaseName::Gripper}) {
    if (name == case_name(c)) {
      out = c;
      return true;
    }
  }
  return false;
}

namespace {

int iround(double x) { return static_cast<int>(std::lround(x)); }

void fix_nodes(const Grid& grid, const std::vector<int>& nodes, int axis,
               std::vector<int>& fixed) {
  const int d = grid.dof_per_node();
  for (int n : nodes) {
    if (axis < 0)
      for (int a = 0; a < d; ++a) fixed.push_back(n * d + a);
    else
      fixed.push_back(n * d + axis);
  }
}

void finish_fixed(std::vector<int>& fixed) {
  std::sort(fixed.begin(), fixed.end());
  fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
}

// Adds a per-node share of `total` along `axis` to every node in the set.
void add_node_total(const Grid& grid, const std::vector<int>& nodes, int axis,
                    double total, LoadCase& lc) {
  const double w = total / static_cast<double>(nodes.size());
  for (int n : nodes) lc.forces.emplace_back(n * grid.dof_per_node() + axis, w);
}

// Distributes a per-area density over the element faces lying on an
// axis-aligned boundary plane inside the node-coordinate box [lo, hi].
// Tributary lumping: each face spreads density * area / 4 to its corners.
void accumulate_face(const Grid& grid, int plane_axis, double plane_value,
                     const std::array<double, 3>& lo,
                     const std::array<double, 3>& hi, double density,
                     std::vector<std::pair<int, double>>& out, int dof_axis) {
  const double h = grid.h();
  const double area = h * h;
  const double tol = 1e-9 * h;
  std::array<int, 8> nodes{};
  const int npe = grid.nodes_per_elem();
  for (int e = 0; e < grid.elem_count(); ++e) {
    grid.elem_nodes(e, nodes);
    std::vector<int> face;
    for (int a = 0; a < npe; ++a) {
      const auto c = grid.node_coord(nodes[a]);
      if (std::abs(c[plane_axis] - plane_value) > tol) continue;
      bool inside = true;
      for (int ax = 0; ax < 3; ++ax)
        if (c[ax] < lo[ax] - tol || c[ax] > hi[ax] + tol) inside = false;
      if (inside) face.push_back(nodes[a]);
    }
    const int expect = grid.dim() == 3 ? 4 : 2;
    if (static_cast<int>(face.size()) != expect) continue;
    const double share =
        density * (grid.dim() == 3 ? area : h) / expect;
    for (int n : face)
      out.emplace_back(n * grid.dof_per_node() + dof_axis, share);
  }
}

void merge_dof_values(std::vector<std::pair<int, double>>& v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<int, double>> merged;
  for (const auto& [dof, val] : v) {
    if (!merged.empty() && merged.back().first == dof)
      merged.back().second += val;
    else
      merged.emplace_back(dof, val);
  }
  v = std::move(merged);
}

MethodConfig base_config(Method m, bool mechanism) {
  MethodConfig c;
  c.method = m;
  c.p = 3.0;
  c.r_min = 3.0;
  c.er = 0.01;
  c.ar_max = 0.1;
  c.tol_volume = m == Method::Levelset ? 5e-3 : 1e-3;
  c.tol_J = mechanism ? 1.0 : 1e-3;
  c.tol_topology = 2.5e-3;
  switch (m) {
    case Method::SimpI:
    case Method::SimpII:
    case Method::SimpIII:
    case Method::Beso:
      c.window = 3;
      break;
    case Method::Vartop:
      c.window = 2;
      break;
    case Method::Levelset:
      c.window = 5;
      break;
  }
  if (mechanism) {
    c.use_objective_criterion = false;
    c.move = 0.1;
    c.eta = 0.3;
    if (m == Method::Beso) c.p = 2.0;
  } else {
    c.move = 0.2;
    c.eta = 0.5;
  }
  c.k_factor = -2.0;
  return c;
}

std::map<Method, MethodConfig> method_bundle(CaseName name) {
  const bool mech = name == CaseName::Gripper;
  std::map<Method, MethodConfig> out;
  for (Method m : {Method::SimpI, Method::SimpII, Method::SimpIII, Method::Beso,
                   Method::Vartop, Method::Levelset}) {
    MethodConfig c = base_config(m, mech);
    const int steps_case =
        (name == CaseName::LShape || name == CaseName::Gripper) ? 8 : 12;
    if (m == Method::SimpII) c.n_steps = steps_case;
    if (m == Method::Vartop) {
      c.n_steps = steps_case;
      switch (name) {
        case CaseName::Cantilever: c.m_exp = 3; c.tau = 1.0; break;
        case CaseName::LShape: c.m_exp = 5; c.tau = 1.5; break;
        case CaseName::MultiLoadCantilever: c.m_exp = 3; c.tau = 1.5; break;
        case CaseName::Gripper: c.m_exp = 100; c.tau = 0.5; break;
      }
    }
    if (m == Method::Levelset) {
      c.n_steps = 1;
      // the multiplier ramps by s*C0 per iteration, so the volume descends
      // far more slowly than in the other methods
      c.max_iters = 30000;
      c.max_iters_per_step = 30000;
      switch (name) {
        case CaseName::Cantilever:
          c.m_exp = 3; c.tau = 1.0; c.dt = 0.1; c.s_penalty = 1e-4;
          break;
        case CaseName::LShape:
          c.m_exp = 5; c.tau = 1.0; c.dt = 0.1; c.s_penalty = 5e-7;
          break;
        case CaseName::MultiLoadCantilever:
          c.m_exp = 3; c.tau = 1.0; c.dt = 0.1; c.s_penalty = 1e-3;
          break;
        case CaseName::Gripper:
          c.m_exp = 100; c.tau = 0.5; c.dt = 0.05; c.s_penalty = 1e-2;
          break;
      }
    }
    out[m] = c;
  }
  return out;
}

[[noreturn]] void misaligned(CaseName name, double scale, double suggestion) {
  std::ostringstream os;
  os << case_name(name) << " at scale " << scale
     << " does not land the loads and regions on mesh nodes; nearest valid "
        "scale is "
     << suggestion;
  throw InvalidArgument(os.str());
}

BuiltCase make_cantilever(double scale, bool multiload) {
  const int nx = std::max(1, iround(50 * scale));
  const int ny = std::max(2, iround(200 * scale));
  const int nz = std::max(2, iround(100 * scale));
  BuiltCase bc{Grid(nx, ny, nz, 1.0), {}, {},
               multiload ? CaseName::MultiLoadCantilever : CaseName::Cantilever,
               scale};
  const Grid& g = bc.grid;
  ProblemSpec& p = bc.problem;
  p.objective = multiload ? Objective::MultiLoad : Objective::MinCompliance;
  p.material.alpha = 1e-6;
  p.target_fraction = 0.1;

  fix_nodes(g, select(g, RegionSelector::plane(1, 0.0, RegionSelector::Target::Nodes)),
            -1, p.masks.fixed_dofs);
  fix_nodes(g, select(g, RegionSelector::plane(0, 0.0, RegionSelector::Target::Nodes)),
            0, p.masks.fixed_dofs);
  finish_fixed(p.masks.fixed_dofs);

  const auto bottom_edge = select(
      g, RegionSelector::box({0, double(ny), 0}, {double(nx), double(ny), 0},
                             RegionSelector::Target::Nodes));
  LoadCase lc1;
  lc1.label = "bottom edge, downward";
  add_node_total(g, bottom_edge, 2, -1.0, lc1);
  merge_dof_values(lc1.forces);
  p.loads.push_back(lc1);
  if (multiload) {
    const auto top_edge = select(
        g, RegionSelector::box({0, double(ny), double(nz)},
                               {double(nx), double(ny), double(nz)},
                               RegionSelector::Target::Nodes));
    LoadCase lc2;
    lc2.label = "top edge, upward";
    add_node_total(g, top_edge, 2, 1.0, lc2);
    merge_dof_values(lc2.forces);
    p.loads.push_back(lc2);
  }
  bc.configs = method_bundle(bc.name);
  return bc;
}

BuiltCase make_lshape(double scale) {
  int nyz = iround(180 * scale);
  if (nyz < 6 || nyz % 6 != 0) {
    const int nearest = std::max(6, 6 * iround(180 * scale / 6.0));
    misaligned(CaseName::LShape, scale, nearest / 180.0);
  }
  const int nx = std::max(1, iround(30 * scale));
  const int ny = nyz, nz = nyz;
  BuiltCase bc{Grid(nx, ny, nz, 1.0), {}, {}, CaseName::LShape, scale};
  const Grid& g = bc.grid;
  ProblemSpec& p = bc.problem;
  p.objective = Objective::MinCompliance;
  p.material.alpha = 1e-6;
  p.target_fraction = 0.1;

  // void block on the top-right: y >= ny/3 and z >= nz/3 (element centers)
  p.masks.elem_state.assign(g.elem_count(), ElemState::Active);
  for (int e = 0; e < g.elem_count(); ++e) {
    const auto ijk = g.elem_ijk(e);
    if (ijk[1] >= ny / 3 && ijk[2] >= nz / 3)
      p.masks.elem_state[e] = ElemState::PassiveVoid;
  }

  // fixture: top face, left third
  const auto top = select(
      g, RegionSelector::box({0, 0, double(nz)},
                             {double(nx), double(ny) / 3.0, double(nz)},
                             RegionSelector::Target::Nodes));
  fix_nodes(g, top, -1, p.masks.fixed_dofs);
  fix_nodes(g, select(g, RegionSelector::plane(0, 0.0, RegionSelector::Target::Nodes)),
            0, p.masks.fixed_dofs);
  finish_fixed(p.masks.fixed_dofs);

  // point load at (0, ny, nz/6) spread over the nearest element face
  const int zl = nz / 6;
  const auto patch = select(
      g, RegionSelector::box({0, double(ny - 1), double(zl)},
                             {0, double(ny), double(zl + 1)},
                             RegionSelector::Target::Nodes));
  LoadCase lc;
  lc.label = "hook tip, downward";
  add_node_total(g, patch, 2, -1.0, lc);
  merge_dof_values(lc.forces);
  p.loads.push_back(lc);
  bc.configs = method_bundle(bc.name);
  return bc;
}

BuiltCase make_gripper(double scale) {
  const int ny = iround(200 * scale);
  const int nz = iround(100 * scale);
  if (ny < 10 || nz < 10 || ny % 10 != 0 || nz % 10 != 0) {
    const double nearest = std::max(1, iround(10 * scale)) / 10.0;
    misaligned(CaseName::Gripper, scale, nearest);
  }
  const int nx = std::max(1, iround(50 * scale));
  BuiltCase bc{Grid(nx, ny, nz, 1.0), {}, {}, CaseName::Gripper, scale};
  const Grid& g = bc.grid;
  ProblemSpec& p = bc.problem;
  p.objective = Objective::Mechanism;
  p.material.alpha = 1e-2;
  p.target_fraction = 0.15;

  const int zfix = nz / 10;    // clamped band height
  const int zport = 9 * nz / 10;  // port surface
  const int ycut = 9 * ny / 10;   // jaw region start
  const int yblk = ny / 10;       // input block depth

  p.masks.elem_state.assign(g.elem_count(), ElemState::Active);
  for (int e = 0; e < g.elem_count(); ++e) {
    const auto ijk = g.elem_ijk(e);
    const int j = ijk[1], k = ijk[2];
    if (j >= ycut && k >= zport)
      p.masks.elem_state[e] = ElemState::PassiveVoid;  // jaw opening
    else if (j < yblk && k >= zport)
      p.masks.elem_state[e] = ElemState::PassiveSolid;  // input pad
    else if (j >= ycut && k >= zport - zfix)
      p.masks.elem_state[e] = ElemState::PassiveSolid;  // jaw pad
  }

  const auto clamp_band = select(
      g, RegionSelector::box({0, 0, 0}, {double(nx), 0, double(zfix)},
                             RegionSelector::Target::Nodes));
  fix_nodes(g, clamp_band, -1, p.masks.fixed_dofs);
  // symmetry: x and z midplanes of the full device
  fix_nodes(g, select(g, RegionSelector::plane(0, double(nx), RegionSelector::Target::Nodes)),
            0, p.masks.fixed_dofs);
  fix_nodes(g, select(g, RegionSelector::plane(2, double(nz), RegionSelector::Target::Nodes)),
            2, p.masks.fixed_dofs);
  finish_fixed(p.masks.fixed_dofs);

  const double f1 = 3.81e-3, f2 = 3.81e-4;
  const double K_in = 0.15, K_out = 1.5;

  LoadCase input;
  input.label = "input port traction";
  accumulate_face(g, 1, 0.0, {0, 0, double(zport)},
                  {double(nx), 0, double(nz)}, f1, input.forces, 1);
  merge_dof_values(input.forces);
  p.loads.push_back(input);

  LoadCase dummy;
  dummy.label = "output port dummy";
  accumulate_face(g, 2, double(zport), {0, double(ycut), double(zport)},
                  {double(nx), double(ny), double(zport)}, f2, dummy.forces, 2);
  merge_dof_values(dummy.forces);
  p.loads.push_back(dummy);

  accumulate_face(g, 1, 0.0, {0, 0, double(zport)},
                  {double(nx), 0, double(nz)}, K_in, p.springs.entries, 1);
  accumulate_face(g, 2, double(zport), {0, double(ycut), double(zport)},
                  {double(nx), double(ny), double(zport)}, K_out,
                  p.springs.entries, 2);
  merge_dof_values(p.springs.entries);

  bc.configs = method_bundle(bc.name);
  return bc;
}

}  // namespace

BuiltCase build_case(CaseName name, double scale) {
  if (!(scale > 0.0 && scale <= 1.0))
    throw InvalidArgument("scale must be in (0, 1]");
  switch (name) {
    case CaseName::Cantilever: return make_cantilever(scale, false);
    case CaseName::MultiLoadCantilever: return make_cantilever(scale, true);
    case CaseName::LShape: return make_lshape(scale);
    case CaseName::Gripper: return make_gripper(scale);
  }
  throw InvalidArgument("unknown case");
}

BuiltCase build_case_2d(CaseName name, double scale) {
  if (name != CaseName::Cantilever && name != CaseName::MultiLoadCantilever)
    throw InvalidArgument("planar twin exists only for the cantilever cases");
  const int nx = std::max(2, iround(48 * scale));
  const int ny = std::max(2, iround(24 * scale));
  BuiltCase bc{Grid(nx, ny, 0, 1.0), {}, {}, name, scale};
  const Grid& g = bc.grid;
  ProblemSpec& p = bc.problem;
  p.objective = name == CaseName::MultiLoadCantilever ? Objective::MultiLoad
                                                      : Objective::MinCompliance;
  p.material.alpha = 1e-6;
  p.target_fraction = 0.1;
  fix_nodes(g, select(g, RegionSelector::plane(0, 0.0, RegionSelector::Target::Nodes)),
            -1, p.masks.fixed_dofs);
  finish_fixed(p.masks.fixed_dofs);
  LoadCase lc1;
  lc1.label = "tip, downward";
  lc1.forces.emplace_back(g.node_id(nx, 0, 0) * 2 + 1, -1.0);
  p.loads.push_back(lc1);
  if (name == CaseName::MultiLoadCantilever) {
    LoadCase lc2;
    lc2.label = "tip, upward";
    lc2.forces.emplace_back(g.node_id(nx, ny, 0) * 2 + 1, 1.0);
    p.loads.push_back(lc2);
  }
  bc.configs = method_bundle(name);
  return bc;
}

ProjectionResult postprocess_projection(const std::vector<double>& design,
                                        Method method, const Grid& grid,
                                        const ProblemSpec& prob) {
  if (static_cast<std::int64_t>(design.size()) != grid.elem_count())
    throw InvalidArgument("design size mismatch");
  const auto acct = detail::VolumeAccounting::build(grid, prob.masks);
  const double ve = grid.elem_volume();

  // BESO and the characteristic-field methods keep voids at a soft floor
  // (rho_min, beta); that floor carries no volume, so the stiff measure is
  // the field net of its floor. SIMP grays count at face value.
  double floor = 0.0;
  if (method == Method::Beso || method == Method::Vartop ||
      method == Method::Levelset) {
    floor = 1.0;
    for (int e : acct.active) floor = std::min(floor, design[e]);
    if (floor >= 1.0) floor = 0.0;
  }
  double stiff_volume = 0.0;
  for (int e : acct.active)
    stiff_volume += (design[e] - floor) / (1.0 - floor) * ve;
  int n_target = static_cast<int>(std::lround(stiff_volume / ve));
  n_target = std::clamp(n_target, 0, static_cast<int>(acct.active.size()));

  std::vector<int> order = acct.active;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (design[a] != design[b]) return design[a] > design[b];
    return a < b;
  });

  ProjectionResult res;
  res.binary.assign(grid.elem_count(), 0.0);
  for (int i = 0; i < n_target; ++i) res.binary[order[i]] = 1.0;
  for (int e = 0; e < grid.elem_count(); ++e)
    if (prob.masks.state(e) == ElemState::PassiveSolid) res.binary[e] = 1.0;
  res.threshold = n_target > 0 && n_target < static_cast<int>(order.size())
                      ? 0.5 * (design[order[n_target - 1]] +
                               design[order[n_target]])
                      : 0.5;

  constexpr double bw_alpha = 1e-9;
  Eigen::VectorXd scale(grid.elem_count());
  for (int e = 0; e < grid.elem_count(); ++e)
    scale[e] = res.binary[e] > 0.5 ? 1.0 : bw_alpha;
  SolverOptions opts;
  opts.rel_tol = 1e-9;
  StateEvaluator eval(grid, prob, opts);
  eval.solve_cases(scale);
  res.J_bw = eval.objective();
  return res;
}

double mean_bar_width(const std::vector<double>& binary, const Grid& grid) {
  if (static_cast<std::int64_t>(binary.size()) != grid.elem_count())
    throw InvalidArgument("field size mismatch");
  const double h = grid.h();
  const double face = grid.dim() == 3 ? h * h : h;
  const int nz = grid.dim() == 3 ? grid.nz() : 1;
  double volume = 0.0, area = 0.0;
  auto solid = [&](int i, int j, int k) {
    return binary[grid.elem_id(i, j, k)] > 0.5;
  };
  for (int e = 0; e < grid.elem_count(); ++e) {
    if (!(binary[e] > 0.5)) continue;
    volume += grid.elem_volume();
    const auto [i, j, k] = grid.elem_ijk(e);
    if (i > 0 && !solid(i - 1, j, k)) area += face;
    if (i + 1 < grid.nx() && !solid(i + 1, j, k)) area += face;
    if (j > 0 && !solid(i, j - 1, k)) area += face;
    if (j + 1 < grid.ny() && !solid(i, j + 1, k)) area += face;
    if (grid.dim() == 3) {
      if (k > 0 && !solid(i, j, k - 1)) area += face;
      if (k + 1 < nz && !solid(i, j, k + 1)) area += face;
    }
  }
  if (area == 0.0) return std::numeric_limits<double>::infinity();
  return volume / area;
}

}  // namespace topo
