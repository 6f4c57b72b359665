#include "topo/vartop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "run_common.hpp"
#include "topo/convergence.hpp"
#include "topo/filters.hpp"
#include "topo/sensitivity.hpp"

namespace topo {

namespace {

// Fraction of a simplex where the linear interpolant of the corner values is
// positive, via the divided-difference identity
//   frac = sum_{d_i > 0} d_i^dim / prod_{j != i} (d_i - d_j).
// Coincident values are separated by a deterministic nudge; the singularities
// are removable, so the error is of the nudge's order. The nudge cannot be
// tiny: the tied terms grow like scale/eps^2 before cancelling, so eps must
// stay well above sqrt(machine eps) for the cancellation to be benign.
template <int N>
double simplex_positive_fraction(std::array<double, N> d) {
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  const double eps = 1e-5 * scale;
  bool clash = true;
  while (clash) {
    clash = false;
    for (int i = 0; i < N && !clash; ++i)
      for (int j = i + 1; j < N && !clash; ++j)
        if (std::abs(d[i] - d[j]) < eps) clash = true;
    if (clash)
      for (int i = 0; i < N; ++i) d[i] += (i + 1) * eps;
  }
  double f = 0.0;
  for (int i = 0; i < N; ++i) {
    if (d[i] <= 0.0) continue;
    double term = 1.0;
    for (int k = 0; k < N - 1; ++k) term *= d[i];
    for (int j = 0; j < N; ++j)
      if (j != i) term /= d[i] - d[j];
    f += term;
  }
  return std::clamp(f, 0.0, 1.0);
}

constexpr int kSub = 4;  // one refinement level per mixed cell

constexpr int kTets[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                             {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};
constexpr int kTris[2][3] = {{0, 1, 2}, {0, 2, 3}};

// local corner bit patterns matching Grid's element-local node order
constexpr int kBits[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                             {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

double mixed_cell_fraction_3d(const std::array<double, 8>& c) {
  // trilinear values on the (kSub+1)^3 subgrid
  double v[kSub + 1][kSub + 1][kSub + 1];
  for (int k = 0; k <= kSub; ++k)
    for (int j = 0; j <= kSub; ++j)
      for (int i = 0; i <= kSub; ++i) {
        const double x = double(i) / kSub, y = double(j) / kSub,
                     z = double(k) / kSub;
        double acc = 0.0;
        for (int l = 0; l < 8; ++l) {
          const double nx = kBits[l][0] ? x : 1.0 - x;
          const double ny = kBits[l][1] ? y : 1.0 - y;
          const double nz = kBits[l][2] ? z : 1.0 - z;
          acc += c[l] * nx * ny * nz;
        }
        v[i][j][k] = acc;
      }
  double frac = 0.0;
  for (int k = 0; k < kSub; ++k)
    for (int j = 0; j < kSub; ++j)
      for (int i = 0; i < kSub; ++i) {
        double cc[8];
        for (int l = 0; l < 8; ++l)
          cc[l] = v[i + kBits[l][0]][j + kBits[l][1]][k + kBits[l][2]];
        for (const auto& t : kTets)
          frac += simplex_positive_fraction<4>(
                      {cc[t[0]], cc[t[1]], cc[t[2]], cc[t[3]]}) /
                  6.0;
      }
  return frac / (kSub * kSub * kSub);
}

double mixed_cell_fraction_2d(const std::array<double, 8>& c) {
  double v[kSub + 1][kSub + 1];
  for (int j = 0; j <= kSub; ++j)
    for (int i = 0; i <= kSub; ++i) {
      const double x = double(i) / kSub, y = double(j) / kSub;
      double acc = 0.0;
      for (int l = 0; l < 4; ++l) {
        const double nx = kBits[l][0] ? x : 1.0 - x;
        const double ny = kBits[l][1] ? y : 1.0 - y;
        acc += c[l] * nx * ny;
      }
      v[i][j] = acc;
    }
  double frac = 0.0;
  for (int j = 0; j < kSub; ++j)
    for (int i = 0; i < kSub; ++i) {
      double cc[4];
      for (int l = 0; l < 4; ++l)
        cc[l] = v[i + kBits[l][0]][j + kBits[l][1]];
      for (const auto& t : kTris)
        frac +=
            simplex_positive_fraction<3>({cc[t[0]], cc[t[1]], cc[t[2]]}) / 2.0;
    }
  return frac / (kSub * kSub);
}

}  // namespace

double tet_positive_fraction(double d0, double d1, double d2, double d3) {
  return simplex_positive_fraction<4>({d0, d1, d2, d3});
}

Eigen::VectorXd element_stiff_fractions(const Eigen::VectorXd& psi,
                                        const Grid& grid) {
  if (psi.size() != grid.node_count())
    throw InvalidArgument("psi must be nodal");
  Eigen::VectorXd frac(grid.elem_count());
  const int npe = grid.nodes_per_elem();
  std::array<int, 8> nodes{};
  for (int e = 0; e < grid.elem_count(); ++e) {
    grid.elem_nodes(e, nodes);
    std::array<double, 8> c{};
    double lo = psi[nodes[0]], hi = lo;
    for (int a = 0; a < npe; ++a) {
      c[a] = psi[nodes[a]];
      lo = std::min(lo, c[a]);
      hi = std::max(hi, c[a]);
    }
    if (lo > 0.0)
      frac[e] = 1.0;
    else if (hi <= 0.0)
      frac[e] = 0.0;
    else
      frac[e] = grid.dim() == 3 ? mixed_cell_fraction_3d(c)
                                : mixed_cell_fraction_2d(c);
  }
  return frac;
}

double volume_from_psi(const Eigen::VectorXd& psi, const Grid& grid) {
  return element_stiff_fractions(psi, grid).sum() * grid.elem_volume();
}

namespace {

void mask_fractions(Eigen::VectorXd& frac, const DomainMasks& masks) {
  if (masks.elem_state.empty()) return;
  for (std::size_t e = 0; e < masks.elem_state.size(); ++e) {
    if (masks.elem_state[e] == ElemState::PassiveVoid)
      frac[e] = 0.0;
    else if (masks.elem_state[e] == ElemState::PassiveSolid)
      frac[e] = 1.0;
  }
}

}  // namespace

CutResult cutting_bisection(const Eigen::VectorXd& xi_reg, double t_void,
                            const Grid& grid, const DomainMasks& masks,
                            double beta, double tol) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must be in (0,1)");
  if (t_void < 0.0 || t_void > 1.0)
    throw InvalidArgument("void target must be in [0,1]");
  const auto acct = detail::VolumeAccounting::build(grid, masks);
  const double D = acct.denom;
  const double ve = grid.elem_volume();

  auto void_fraction = [&](double lambda, CutResult& out) {
    out.psi = xi_reg.array() - lambda / D;
    out.fractions = element_stiff_fractions(out.psi, grid);
    mask_fractions(out.fractions, masks);
    double stiff = acct.passive_solid;
    for (int e : acct.active) stiff += out.fractions[e] * ve;
    out.lambda = lambda;
    return 1.0 - stiff / D;
  };

  const double xlo = xi_reg.minCoeff(), xhi = xi_reg.maxCoeff();
  if (!(xhi > xlo))
    throw InvalidState("flat regularized pseudo-energy; cut is undefined");
  double lo = (xlo - 1.0) * D, hi = (xhi + 1.0) * D;

  CutResult res;
  double best_err = 2.0;
  CutResult best;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double vf = void_fraction(mid, res);
    const double err = std::abs(t_void - vf);
    if (err < best_err) {
      best_err = err;
      best = res;
    }
    if (err <= tol) break;
    (vf < t_void ? lo : hi) = mid;
  }
  if (best_err > 10.0 * tol)
    throw InvalidState("cutting bisection failed to match the volume target");
  best.chi = beta + (1.0 - beta) * best.fractions.array();
  return best;
}

RunRecord run_vartop(const Grid& grid, const ProblemSpec& prob,
                     const MethodConfig& cfg) {
  RunRecord rec;
  rec.method = Method::Vartop;
  const double alpha = prob.material.alpha;
  const double beta = std::pow(alpha, 1.0 / cfg.m_exp);
  const double fbar = prob.target_fraction;
  const auto acct = detail::VolumeAccounting::build(grid, prob.masks);

  SolverOptions sopts;
  sopts.rel_tol = cfg.solver_rel_tol;
  StateEvaluator eval(grid, prob, sopts);
  NodalLaplacian reg(grid, cfg.tau);
  NodalLaplacian crit_reg(grid, cfg.tau_criterion);

  Eigen::VectorXd psi = Eigen::VectorXd::Ones(grid.node_count());
  Eigen::VectorXd fractions = element_stiff_fractions(psi, grid);
  mask_fractions(fractions, prob.masks);
  Eigen::VectorXd chi = beta + (1.0 - beta) * fractions.array();
  ShiftNormState norm_state;

  const double J0 = detail::reference_objective(eval, grid, prob);
  rec.J0 = J0;
  const double J0n = detail::j0_norm(J0);
  detail::push_record(rec, 0, 0, J0, J0, 1.0, detail::nan_marker(),
                      detail::nan_marker(), 0.0);

  int iter = 0;
  bool converged = false;

  try {
    for (int j = 1; j <= cfg.n_steps; ++j) {
      const double f_j =
          volume_schedule(1.0, fbar, cfg.k_factor, cfg.n_steps, j);
      const double t_j = 1.0 - f_j;
      const double tolJ = tolerance_schedule(j, cfg.n_steps, cfg.tol_J);
      const double tolT = tolerance_schedule(j, cfg.n_steps, cfg.tol_topology);

      std::vector<double> stepJ;
      if (j == 1) stepJ.push_back(J0);
      bool step_done = false;

      // the raw cut is an undamped fixed point and flip-flops whole bars at
      // coarse meshes; blend the new level set into the old one and back off
      // further whenever an accepted update made the objective jump
      double relax = cfg.relax;
      double J_accepted = std::numeric_limits<double>::infinity();
      Eigen::VectorXd po_saved, pn_saved;

      for (int it = 0; it < cfg.max_iters_per_step && iter < cfg.max_iters;
           ++it) {
        const Eigen::VectorXd scale =
            fractions.array() + (1.0 - fractions.array()) * alpha;
        eval.solve_cases(scale);
        const double J = eval.objective();

        if (std::abs(J) > 1.5 * std::abs(J_accepted) && relax > 0.05 &&
            po_saved.size() > 0) {
          relax *= 0.5;  // retry the rejected blend from the saved fields
          psi = (1.0 - relax) * po_saved + relax * pn_saved;
          fractions = element_stiff_fractions(psi, grid);
          mask_fractions(fractions, prob.masks);
          chi = beta + (1.0 - beta) * fractions.array();
          continue;
        }
        ++iter;
        J_accepted = J;

        Eigen::VectorXd xi = vartop_pseudo_energy(eval, chi, cfg.m_exp, beta);
        if (!norm_state.frozen) norm_state.freeze_from(xi);
        const Eigen::VectorXd xi_hat = shift_normalize(xi, chi, norm_state);
        const Eigen::VectorXd xi_nodal =
            element_to_node_average(grid, xi_hat);
        const Eigen::VectorXd xi_reg = reg.regularize_nodal(xi_nodal);

        CutResult cut =
            cutting_bisection(xi_reg, t_j, grid, prob.masks, beta,
                              cfg.tol_volume);

        stepJ.push_back(J);

        po_saved = psi / std::max(1e-300, psi.cwiseAbs().maxCoeff());
        pn_saved = cut.psi / cut.psi.cwiseAbs().maxCoeff();

        Eigen::VectorXd psi_new = (1.0 - relax) * po_saved + relax * pn_saved;
        Eigen::VectorXd frac_new = element_stiff_fractions(psi_new, grid);
        mask_fractions(frac_new, prob.masks);
        Eigen::VectorXd chi_new = beta + (1.0 - beta) * frac_new.array();

        const auto dJc = objective_criterion(stepJ, cfg.window, J0n);
        const double dtopo = topology_criterion(chi, chi_new, grid,
                                                TopologyMode::Nodal, &crit_reg);
        double stiff = acct.passive_solid;
        for (int e : acct.active) stiff += frac_new[e] * grid.elem_volume();
        const double vol = stiff / acct.denom;
        detail::push_record(rec, iter, j, J, J0, vol,
                            dJc ? *dJc : detail::nan_marker(), dtopo,
                            cut.lambda);

        psi = std::move(psi_new);
        chi = std::move(chi_new);
        fractions = std::move(frac_new);

        const bool vol_ok = std::abs(vol - f_j) <= cfg.tol_volume;
        const bool J_ok =
            !cfg.use_objective_criterion || (dJc && *dJc <= tolJ);
        if (vol_ok && J_ok && dJc.has_value() && dtopo <= tolT) {
          step_done = true;
          break;
        }
      }
      if (step_done) rec.converged_steps.push_back(j);
      if (j == cfg.n_steps) converged = step_done;
    }
  } catch (const SolverFailure& e) {
    rec.failure = e.what();
  } catch (const InvalidState& e) {
    rec.failure = e.what();
  }

  rec.converged = converged;
  rec.final_element_field.assign(chi.data(), chi.data() + chi.size());
  rec.final_nodal_field.assign(psi.data(), psi.data() + psi.size());
  return rec;
}

}  // namespace topo
