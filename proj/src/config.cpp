#include "topo/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace topo {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {
    "schema_version", "case",     "scale",          "two_d",
    "methods",        "out_dir",  "allow_large",    "parallel",
    "seed",           "export_fields", "export_histories", "overrides"};

[[noreturn]] void bad(const std::string& msg) { throw InvalidArgument(msg); }

}  // namespace

void apply_overrides(MethodConfig& mc,
                     const std::map<std::string, double>& overrides) {
  for (const auto& [key, v] : overrides) {
    if (key == "p") mc.p = v;
    else if (key == "move") mc.move = v;
    else if (key == "eta") mc.eta = v;
    else if (key == "er") mc.er = v;
    else if (key == "ar_max") mc.ar_max = v;
    else if (key == "m_exp") mc.m_exp = v;
    else if (key == "tau") mc.tau = v;
    else if (key == "dt") mc.dt = v;
    else if (key == "s_penalty") mc.s_penalty = v;
    else if (key == "kappa") mc.kappa = v;
    else if (key == "relax") mc.relax = v;
    else if (key == "r_min") mc.r_min = v;
    else if (key == "n_steps") mc.n_steps = static_cast<int>(v);
    else if (key == "k_factor") mc.k_factor = v;
    else if (key == "tol_volume") mc.tol_volume = v;
    else if (key == "tol_J") mc.tol_J = v;
    else if (key == "tol_topology") mc.tol_topology = v;
    else if (key == "window") mc.window = static_cast<int>(v);
    else if (key == "max_iters") mc.max_iters = static_cast<int>(v);
    else if (key == "max_iters_per_step")
      mc.max_iters_per_step = static_cast<int>(v);
    else if (key == "solver_rel_tol") mc.solver_rel_tol = v;
    else bad("unknown parameter override: " + key);
  }
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("config root must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!kTopKeys.count(it.key())) bad("unknown config key: " + it.key());

  RunConfig c;
  if (!j.contains("schema_version")) bad("schema_version is required");
  c.schema_version = j["schema_version"].get<int>();
  if (c.schema_version != 1) bad("unsupported schema_version");

  if (j.contains("case")) {
    const std::string s = j["case"].get<std::string>();
    if (!case_from_name(s, c.case_name)) bad("unknown case: " + s);
  }
  if (j.contains("scale")) c.scale = j["scale"].get<double>();
  if (!(c.scale > 0.0 && c.scale <= 1.0)) bad("scale must be in (0, 1]");
  if (j.contains("two_d")) c.two_d = j["two_d"].get<bool>();

  if (!j.contains("methods")) bad("methods is required");
  if (!j["methods"].is_array() || j["methods"].empty())
    bad("methods must be a nonempty list");
  for (const auto& m : j["methods"]) {
    Method method;
    const std::string s = m.get<std::string>();
    if (!method_from_name(s, method)) bad("unknown method: " + s);
    c.methods.push_back(method);
  }

  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("allow_large")) c.allow_large = j["allow_large"].get<bool>();
  if (j.contains("parallel")) c.parallel = j["parallel"].get<int>();
  if (c.parallel < 1) bad("parallel must be >= 1");
  if (j.contains("seed")) c.seed = j["seed"].get<unsigned>();
  if (j.contains("export_fields"))
    c.export_fields = j["export_fields"].get<bool>();
  if (j.contains("export_histories"))
    c.export_histories = j["export_histories"].get<bool>();

  if (j.contains("overrides")) {
    if (!j["overrides"].is_object()) bad("overrides must be an object");
    for (auto it = j["overrides"].begin(); it != j["overrides"].end(); ++it) {
      if (!it.value().is_number()) bad("override values must be numbers");
      c.overrides[it.key()] = it.value().get<double>();
    }
    MethodConfig probe;  // reject unknown names eagerly
    apply_overrides(probe, c.overrides);
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["case"] = case_name(c.case_name);
  j["scale"] = c.scale;
  j["two_d"] = c.two_d;
  j["methods"] = json::array();
  for (Method m : c.methods) j["methods"].push_back(method_name(m));
  j["out_dir"] = c.out_dir;
  j["allow_large"] = c.allow_large;
  j["parallel"] = c.parallel;
  j["seed"] = c.seed;
  j["export_fields"] = c.export_fields;
  j["export_histories"] = c.export_histories;
  j["overrides"] = json::object();
  for (const auto& [k, v] : c.overrides) j["overrides"][k] = v;
  return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidState("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidState("cannot open config file for writing: " + path);
  out << serialize_config(cfg);
}

}  // namespace topo
