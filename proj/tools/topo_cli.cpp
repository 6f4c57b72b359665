// Command-line front end. Talks to the core exclusively through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "topoc.h"

namespace {

int die(const char* verb) {
  std::cerr << verb << ": " << topoc_last_error() << "\n";
  return 1;
}

struct ConfigFlags {
  std::string config_path;
  std::string out_dir;
  double scale = 0.0;
  std::string methods;
  bool allow_large = false;
  int parallel = 0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f, bool out_required) {
  cmd->add_option("--config", f.config_path, "run configuration (JSON)")
      ->required();
  auto* out = cmd->add_option("--out", f.out_dir, "output directory");
  if (out_required) out->required();
  cmd->add_option("--scale", f.scale, "resolution scale override in (0,1]");
  cmd->add_option("--methods", f.methods,
                  "comma-separated method list override");
  cmd->add_flag("--allow-large", f.allow_large,
                "permit grids beyond the desk-scale budget");
  cmd->add_option("--parallel", f.parallel, "concurrent method jobs");
}

topoc_config* load_with_flags(const ConfigFlags& f) {
  topoc_config* cfg = nullptr;
  if (topoc_config_load(f.config_path.c_str(), &cfg) != TOPOC_OK)
    return nullptr;
  bool ok = true;
  if (!f.out_dir.empty())
    ok = ok && topoc_config_set_out_dir(cfg, f.out_dir.c_str()) == TOPOC_OK;
  if (f.scale > 0.0)
    ok = ok && topoc_config_set_scale(cfg, f.scale) == TOPOC_OK;
  if (!f.methods.empty())
    ok = ok && topoc_config_set_methods(cfg, f.methods.c_str()) == TOPOC_OK;
  if (f.allow_large)
    ok = ok && topoc_config_set_allow_large(cfg, 1) == TOPOC_OK;
  if (f.parallel > 0)
    ok = ok && topoc_config_set_parallel(cfg, f.parallel) == TOPOC_OK;
  if (!ok) {
    topoc_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology-optimization benchmark harness"};
  app.require_subcommand(1);

  ConfigFlags run_flags, validate_flags, export_flags;
  std::string report_dir;

  auto* run_cmd = app.add_subcommand("run", "execute the configured methods");
  add_config_flags(run_cmd, run_flags, false);

  auto* validate_cmd =
      app.add_subcommand("validate", "check a configuration without running");
  add_config_flags(validate_cmd, validate_flags, false);

  auto* report_cmd =
      app.add_subcommand("report", "print the summary of a finished run");
  report_cmd->add_option("--out", report_dir, "run output directory")
      ->required();

  auto* export_cmd =
      app.add_subcommand("export", "write the case domain preview");
  add_config_flags(export_cmd, export_flags, true);

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    topoc_config* cfg = load_with_flags(run_flags);
    if (!cfg) return die("run");
    topoc_run* run = nullptr;
    if (topoc_run_execute(cfg, &run) != TOPOC_OK) {
      topoc_config_free(cfg);
      return die("run");
    }
    std::ifstream summary(topoc_run_summary_path(run));
    std::cout << summary.rdbuf();
    const bool ok = topoc_run_any_ok(run) != 0;
    if (!ok) {
      for (int i = 0; i < topoc_run_outcome_count(run); ++i)
        std::cerr << topoc_run_method_name(run, i) << ": "
                  << topoc_run_method_error(run, i) << "\n";
    }
    topoc_run_free(run);
    topoc_config_free(cfg);
    return ok ? 0 : 1;
  }

  if (validate_cmd->parsed()) {
    topoc_config* cfg = load_with_flags(validate_flags);
    if (!cfg) return die("validate");
    const topoc_status st = topoc_config_validate(cfg);
    topoc_config_free(cfg);
    if (st != TOPOC_OK) return die("validate");
    std::cout << "configuration valid\n";
    return 0;
  }

  if (report_cmd->parsed()) {
    char* text = nullptr;
    if (topoc_report(report_dir.c_str(), &text) != TOPOC_OK)
      return die("report");
    std::cout << text;
    topoc_string_free(text);
    return 0;
  }

  if (export_cmd->parsed()) {
    topoc_config* cfg = load_with_flags(export_flags);
    if (!cfg) return die("export");
    const topoc_status st =
        topoc_export_case(cfg, export_flags.out_dir.c_str());
    topoc_config_free(cfg);
    if (st != TOPOC_OK) return die("export");
    std::cout << "domain preview written to " << export_flags.out_dir << "\n";
    return 0;
  }

  return 1;
}
