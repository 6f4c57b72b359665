#include "topoc.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "topo/config.hpp"
#include "topo/io.hpp"
#include "topo/runner.hpp"

struct topoc_config {
  topo::RunConfig cfg;
};

struct topoc_run {
  topo::RunSummary summary;
};

namespace {

thread_local std::string g_last_error;

topoc_status fail(topoc_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename F>
topoc_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return TOPOC_OK;
  } catch (const topo::InvalidArgument& e) {
    return fail(TOPOC_EINVAL, e.what());
  } catch (const topo::SolverFailure& e) {
    return fail(TOPOC_ESOLVER, e.what());
  } catch (const topo::InvalidState& e) {
    return fail(TOPOC_ESTATE, e.what());
  } catch (const std::exception& e) {
    return fail(TOPOC_EUNKNOWN, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const topo::MethodOutcome* outcome(const topoc_run* run, int idx) {
  if (!run || idx < 0 ||
      idx >= static_cast<int>(run->summary.outcomes.size()))
    return nullptr;
  return &run->summary.outcomes[idx];
}

}  // namespace

extern "C" {

const char* topoc_version(void) { return "1.0.0"; }

const char* topoc_last_error(void) { return g_last_error.c_str(); }

void topoc_string_free(char* s) { std::free(s); }

topoc_status topoc_config_parse(const char* json_text, topoc_config** out) {
  if (!json_text || !out) return fail(TOPOC_EINVAL, "null argument");
  return guarded([&] {
    auto* h = new topoc_config{topo::parse_config(json_text)};
    *out = h;
  });
}

topoc_status topoc_config_load(const char* path, topoc_config** out) {
  if (!path || !out) return fail(TOPOC_EINVAL, "null argument");
  return guarded([&] {
    auto* h = new topoc_config{topo::load_config(path)};
    *out = h;
  });
}

topoc_status topoc_config_serialize(const topoc_config* cfg, char** out_text) {
  if (!cfg || !out_text) return fail(TOPOC_EINVAL, "null argument");
  return guarded([&] { *out_text = dup_string(topo::serialize_config(cfg->cfg)); });
}

void topoc_config_free(topoc_config* cfg) { delete cfg; }

topoc_status topoc_config_set_scale(topoc_config* cfg, double scale) {
  if (!cfg) return fail(TOPOC_EINVAL, "null config");
  if (!(scale > 0.0 && scale <= 1.0))
    return fail(TOPOC_EINVAL, "scale must be in (0, 1]");
  cfg->cfg.scale = scale;
  return TOPOC_OK;
}

topoc_status topoc_config_set_out_dir(topoc_config* cfg, const char* dir) {
  if (!cfg || !dir) return fail(TOPOC_EINVAL, "null argument");
  cfg->cfg.out_dir = dir;
  return TOPOC_OK;
}

topoc_status topoc_config_set_methods(topoc_config* cfg, const char* list) {
  if (!cfg || !list) return fail(TOPOC_EINVAL, "null argument");
  std::vector<topo::Method> methods;
  std::istringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    topo::Method m;
    if (!topo::method_from_name(tok, m))
      return fail(TOPOC_EINVAL, "unknown method in list");
    methods.push_back(m);
  }
  if (methods.empty()) return fail(TOPOC_EINVAL, "empty method list");
  cfg->cfg.methods = std::move(methods);
  return TOPOC_OK;
}

topoc_status topoc_config_set_allow_large(topoc_config* cfg, int enable) {
  if (!cfg) return fail(TOPOC_EINVAL, "null config");
  cfg->cfg.allow_large = enable != 0;
  return TOPOC_OK;
}

topoc_status topoc_config_set_parallel(topoc_config* cfg, int workers) {
  if (!cfg || workers < 1) return fail(TOPOC_EINVAL, "workers must be >= 1");
  cfg->cfg.parallel = workers;
  return TOPOC_OK;
}

topoc_status topoc_config_validate(const topoc_config* cfg) {
  if (!cfg) return fail(TOPOC_EINVAL, "null config");
  return guarded([&] {
    if (cfg->cfg.methods.empty())
      throw topo::InvalidArgument("no methods selected");
    topo::BuiltCase bc = cfg->cfg.two_d
                             ? topo::build_case_2d(cfg->cfg.case_name,
                                                   cfg->cfg.scale)
                             : topo::build_case(cfg->cfg.case_name,
                                                cfg->cfg.scale);
    topo::MethodConfig probe = bc.configs.begin()->second;
    topo::apply_overrides(probe, cfg->cfg.overrides);
  });
}

topoc_status topoc_run_execute(const topoc_config* cfg, topoc_run** out) {
  if (!cfg || !out) return fail(TOPOC_EINVAL, "null argument");
  return guarded([&] {
    auto* h = new topoc_run{topo::run_all(cfg->cfg)};
    *out = h;
  });
}

void topoc_run_free(topoc_run* run) { delete run; }

int topoc_run_outcome_count(const topoc_run* run) {
  return run ? static_cast<int>(run->summary.outcomes.size()) : 0;
}

int topoc_run_any_ok(const topoc_run* run) {
  return run && topo::any_ok(run->summary) ? 1 : 0;
}

const char* topoc_run_method_name(const topoc_run* run, int idx) {
  const auto* o = outcome(run, idx);
  return o ? topo::method_name(o->method) : "";
}

int topoc_run_method_ok(const topoc_run* run, int idx) {
  const auto* o = outcome(run, idx);
  return o && o->ok ? 1 : 0;
}

int topoc_run_method_converged(const topoc_run* run, int idx) {
  const auto* o = outcome(run, idx);
  return o && o->record.converged ? 1 : 0;
}

int topoc_run_method_iterations(const topoc_run* run, int idx) {
  const auto* o = outcome(run, idx);
  return o ? o->quality.iteration_count : 0;
}

double topoc_run_method_j_blackwhite(const topoc_run* run, int idx) {
  const auto* o = outcome(run, idx);
  return o ? o->quality.J_blackwhite : 0.0;
}

double topoc_run_method_bar_width(const topoc_run* run, int idx) {
  const auto* o = outcome(run, idx);
  return o ? o->quality.mean_bar_width : 0.0;
}

const char* topoc_run_method_error(const topoc_run* run, int idx) {
  const auto* o = outcome(run, idx);
  return o ? o->error.c_str() : "";
}

const char* topoc_run_summary_path(const topoc_run* run) {
  return run ? run->summary.summary_txt_path.c_str() : "";
}

topoc_status topoc_export_case(const topoc_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return fail(TOPOC_EINVAL, "null argument");
  return guarded([&] {
    topo::BuiltCase bc = cfg->cfg.two_d
                             ? topo::build_case_2d(cfg->cfg.case_name,
                                                   cfg->cfg.scale)
                             : topo::build_case(cfg->cfg.case_name,
                                                cfg->cfg.scale);
    std::vector<double> states(bc.grid.elem_count(), 0.0);
    for (std::size_t e = 0; e < states.size(); ++e)
      states[e] = static_cast<double>(
          static_cast<int>(bc.problem.masks.state(e)));
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path =
        (fs::path(out_dir) /
         (std::string(topo::case_name(bc.name)) + "_domain.vtk"))
            .string();
    topo::export_field(states, topo::FieldKind::Element, bc.grid,
                       "element_state", path);
  });
}

topoc_status topoc_report(const char* out_dir, char** out_text) {
  if (!out_dir || !out_text) return fail(TOPOC_EINVAL, "null argument");
  return guarded([&] {
    namespace fs = std::filesystem;
    const std::string path = (fs::path(out_dir) / "summary.txt").string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw topo::InvalidState("no summary found in: " + std::string(out_dir));
    std::ostringstream ss;
    ss << in.rdbuf();
    *out_text = dup_string(ss.str());
  });
}

}  // extern "C"
