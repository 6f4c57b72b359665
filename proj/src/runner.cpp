#include "topo/runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "topo/beso.hpp"
#include "topo/io.hpp"
#include "topo/levelset.hpp"
#include "topo/simp.hpp"
#include "topo/vartop.hpp"

namespace topo {

RunRecord run_method(const Grid& grid, const ProblemSpec& prob,
                     const MethodConfig& cfg) {
  switch (cfg.method) {
    case Method::SimpI: return run_simp(SimpVariant::I, grid, prob, cfg);
    case Method::SimpII: return run_simp(SimpVariant::II, grid, prob, cfg);
    case Method::SimpIII: return run_simp(SimpVariant::III, grid, prob, cfg);
    case Method::Beso: return run_beso(grid, prob, cfg);
    case Method::Vartop: return run_vartop(grid, prob, cfg);
    case Method::Levelset: return run_levelset(grid, prob, cfg);
  }
  throw InvalidArgument("unknown method");
}

namespace {

constexpr std::int64_t kDeskElementBudget = 200000;

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

void write_summary(const RunSummary& s, const std::string& csv_path,
                   const std::string& txt_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw InvalidState("cannot write summary: " + csv_path);
  csv << "method,iterations,converged,J,J_over_J0,J_bw,h_bar,vol_frac,"
         "error\n";
  for (const auto& o : s.outcomes) {
    const auto& h = o.record.history;
    const double J = h.empty() ? 0.0 : h.back().J;
    const double Jn = h.empty() ? 0.0 : h.back().J_over_J0;
    csv << method_name(o.method) << ',' << o.quality.iteration_count << ','
        << (o.record.converged ? 1 : 0) << ',' << num(J, 9) << ','
        << num(Jn, 9) << ',' << num(o.quality.J_blackwhite, 9) << ','
        << num(o.quality.mean_bar_width, 9) << ','
        << num(o.quality.volume_fraction_final, 9) << ','
        << (o.ok ? "" : o.error) << '\n';
  }

  std::ofstream txt(txt_path, std::ios::binary);
  if (!txt) throw InvalidState("cannot write summary: " + txt_path);
  txt << std::left << std::setw(10) << "method" << std::right << std::setw(8)
      << "iters" << std::setw(6) << "conv" << std::setw(14) << "J/J0"
      << std::setw(14) << "J_bw" << std::setw(12) << "h_bar" << std::setw(12)
      << "vol" << '\n';
  for (const auto& o : s.outcomes) {
    const auto& h = o.record.history;
    txt << std::left << std::setw(10) << method_name(o.method) << std::right
        << std::setw(8) << o.quality.iteration_count << std::setw(6)
        << (o.record.converged ? "yes" : "no") << std::setw(14)
        << num(h.empty() ? 0.0 : h.back().J_over_J0) << std::setw(14)
        << num(o.quality.J_blackwhite) << std::setw(12)
        << num(o.quality.mean_bar_width) << std::setw(12)
        << num(o.quality.volume_fraction_final) << '\n';
    if (!o.ok) txt << "  aborted: " << o.error << '\n';
  }
}

}  // namespace

RunSummary run_all(const RunConfig& cfg) {
  if (cfg.methods.empty()) throw InvalidArgument("no methods selected");
  BuiltCase bc = cfg.two_d ? build_case_2d(cfg.case_name, cfg.scale)
                           : build_case(cfg.case_name, cfg.scale);
  if (bc.grid.elem_count() > kDeskElementBudget && !cfg.allow_large)
    throw InvalidArgument(
        "grid exceeds the desk-scale element budget; pass allow_large to run");

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  save_config(cfg, (fs::path(cfg.out_dir) / "run_config.json").string());

  RunSummary summary;
  summary.outcomes.resize(cfg.methods.size());

  auto job = [&](std::size_t idx) {
    MethodOutcome& o = summary.outcomes[idx];
    o.method = cfg.methods[idx];
    MethodConfig mc = bc.configs.at(o.method);
    apply_overrides(mc, cfg.overrides);
    try {
      o.record = run_method(bc.grid, bc.problem, mc);
      o.ok = o.record.failure.empty();
      o.error = o.record.failure;
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
      return;
    }

    o.quality.iteration_count =
        static_cast<int>(o.record.history.size()) - 1;  // minus reference
    o.quality.volume_fraction_final =
        o.record.history.empty() ? 0.0 : o.record.history.back().vol_frac;
    try {
      ProjectionResult proj = postprocess_projection(
          o.record.final_element_field, o.method, bc.grid, bc.problem);
      o.quality.J_blackwhite = proj.J_bw;
      o.quality.mean_bar_width = mean_bar_width(proj.binary, bc.grid);

      const std::string stem =
          std::string(case_name(bc.name)) + "_" + method_name(o.method);
      const fs::path dir(cfg.out_dir);
      if (cfg.export_histories) {
        o.history_path = (dir / (stem + "_history.csv")).string();
        export_history(o.record, o.history_path);
      }
      if (cfg.export_fields) {
        o.field_path = (dir / (stem + "_design.vtk")).string();
        export_field(o.record.final_element_field, FieldKind::Element, bc.grid,
                     "design", o.field_path);
        o.binary_path = (dir / (stem + "_binary.vtk")).string();
        export_field(proj.binary, FieldKind::Element, bc.grid, "binary",
                     o.binary_path);
        if (!o.record.final_nodal_field.empty()) {
          o.nodal_path = (dir / (stem + "_nodal.vtk")).string();
          export_field(o.record.final_nodal_field, FieldKind::Nodal, bc.grid,
                       "psi", o.nodal_path);
        }
      }
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
    }
  };

  const int workers = std::min<int>(cfg.parallel,
                                    static_cast<int>(cfg.methods.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cfg.methods.size(); i = next++)
          job(i);
      });
    for (auto& t : pool) t.join();
  }

  summary.summary_csv_path =
      (std::filesystem::path(cfg.out_dir) / "summary.csv").string();
  summary.summary_txt_path =
      (std::filesystem::path(cfg.out_dir) / "summary.txt").string();
  write_summary(summary, summary.summary_csv_path, summary.summary_txt_path);
  return summary;
}

bool any_ok(const RunSummary& s) {
  for (const auto& o : s.outcomes)
    if (o.ok) return true;
  return false;
}

}  // namespace topo
