// SPDX-License-Identifier: Apache-2.0

#include "jjaqed/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "jjaqed/constants.hpp"
#include "jjaqed/errors.hpp"

namespace jjaqed {

namespace {

struct TaskInfo {
  Task task;
  const char* name;
};

constexpr TaskInfo kTasks[] = {
    {Task::Modes, "modes"},           {Task::Jja, "jja"},
    {Task::Track, "track"},           {Task::Couplings, "couplings"},
    {Task::Perturbation, "perturbation"}, {Task::Dynamics, "dynamics"},
    {Task::Spectrum, "spectrum"},     {Task::SweepChi, "sweep-chi"},
    {Task::SweepOmega, "sweep-omega"}, {Task::Impedance, "impedance"},
    {Task::Nonlinear, "nonlinear"},
};

[[noreturn]] void schema(const std::string& what) { fail(ErrorKind::Schema, what); }

// Unit tables: suffix -> SI multiplier. Frequencies are turned into angular
// frequency by the caller.
const std::map<std::string, std::map<std::string, double>>& unit_tables() {
  static const std::map<std::string, std::map<std::string, double>> t = {
      {"inductance", {{"H", 1.0}, {"mH", 1e-3}, {"uH", 1e-6}, {"nH", 1e-9}, {"pH", 1e-12}}},
      {"capacitance", {{"F", 1.0}, {"uF", 1e-6}, {"nF", 1e-9}, {"pF", 1e-12}, {"fF", 1e-15}, {"aF", 1e-18}}},
      {"frequency",
       {{"Hz", 2 * M_PI}, {"kHz", 2 * M_PI * 1e3}, {"MHz", 2 * M_PI * 1e6}, {"GHz", 2 * M_PI * 1e9},
        {"THz", 2 * M_PI * 1e12}, {"rad/s", 1.0}}},
      // Energies may be quoted as frequencies, E = h f.
      {"energy",
       {{"J", 1.0}, {"eV", constants::e}, {"ueV", constants::e * 1e-6}, {"Hz", constants::h},
        {"MHz", constants::h * 1e6}, {"GHz", constants::h * 1e9}}},
      {"temperature", {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}}},
      {"resistance", {{"ohm", 1.0}, {"Ohm", 1.0}, {"kohm", 1e3}, {"kOhm", 1e3}, {"Mohm", 1e6}}},
      {"flux", {{"Wb", 1.0}}},
      {"cubic", {{"J/Wb^3", 1.0}}},
      {"dimensionless", {}},
  };
  return t;
}

const char* si_unit(const std::string& kind) {
  if (kind == "inductance") return "H";
  if (kind == "capacitance") return "F";
  if (kind == "frequency") return "rad/s";
  if (kind == "energy") return "J";
  if (kind == "temperature") return "K";
  if (kind == "resistance") return "ohm";
  if (kind == "flux") return "Wb";
  if (kind == "cubic") return "J/Wb^3";
  return "";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quantity(double v, const std::string& kind) {
  const std::string u = si_unit(kind);
  return u.empty() ? fmt(v) : fmt(v) + " " + u;
}

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.line < 0) return "";
  return " (line " + std::to_string(m.line + 1) + ")";
}

double scalar_quantity(const YAML::Node& n, const std::string& key, const std::string& kind) {
  if (!n.IsScalar()) schema("'" + key + "' must be a scalar" + where(n));
  try {
    return parse_quantity(n.Scalar(), kind);
  } catch (const Error& e) {
    schema("'" + key + "': " + e.what() + where(n));
  }
}

int integer(const YAML::Node& n, const std::string& key) {
  const double v = scalar_quantity(n, key, "dimensionless");
  if (v != std::floor(v) || std::abs(v) > 1e9) schema("'" + key + "' must be an integer" + where(n));
  return static_cast<int>(v);
}

std::string text(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) schema("'" + key + "' must be a string" + where(n));
  return n.Scalar();
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& ctx) {
  if (!map.IsMap()) schema("'" + ctx + "' must be a mapping" + where(map));
  for (const auto& kv : map) {
    const std::string k = kv.first.as<std::string>();
    if (!allowed.count(k)) schema("unknown key '" + k + "' in " + ctx + where(kv.first));
  }
}

// A grid is either an explicit list or {start, stop, count, spacing}.
std::vector<double> grid(const YAML::Node& n, const std::string& key, const std::string& kind) {
  std::vector<double> out;
  if (n.IsSequence()) {
    for (const auto& v : n) out.push_back(scalar_quantity(v, key, kind));
  } else if (n.IsMap()) {
    reject_unknown(n, {"start", "stop", "count", "spacing"}, key);
    if (!n["start"] || !n["stop"] || !n["count"]) schema("'" + key + "' needs start, stop and count" + where(n));
    const double a = scalar_quantity(n["start"], key + ".start", kind);
    const double b = scalar_quantity(n["stop"], key + ".stop", kind);
    const int count = integer(n["count"], key + ".count");
    const std::string spacing = n["spacing"] ? text(n["spacing"], key + ".spacing") : "linear";
    if (count < 1) schema("'" + key + ".count' must be at least 1");
    if (spacing == "linear") {
      for (int i = 0; i < count; ++i) out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    } else if (spacing == "log") {
      if (!(a > 0.0 && b > 0.0)) schema("log-spaced '" + key + "' needs positive bounds");
      const double la = std::log(a), lb = std::log(b);
      for (int i = 0; i < count; ++i) out.push_back(count == 1 ? a : std::exp(la + (lb - la) * i / (count - 1)));
    } else {
      schema("'" + key + ".spacing' must be linear or log");
    }
  } else {
    schema("'" + key + "' must be a list or a {start, stop, count} mapping" + where(n));
  }
  if (out.empty()) schema("'" + key + "' is empty");
  return out;
}

std::set<std::string> grid_keys(Task t) {
  switch (t) {
    case Task::Modes:
    case Task::Jja:
    case Task::Couplings:
    case Task::Perturbation:
      return {};
    case Task::Track:
      return {"chi_target", "initial_steps", "overlap_threshold"};
    case Task::Dynamics:
      return {"t_max", "t_points", "method"};
    case Task::Spectrum:
      return {"t_max", "t_points"};
    case Task::SweepChi:
      return {"chi", "initial_steps", "overlap_threshold"};
    case Task::SweepOmega:
      return {"omega_A", "initial_steps", "overlap_threshold"};
    case Task::Impedance:
      return {"omega"};
    case Task::Nonlinear:
      return {"Lambda", "lambda_scale", "phi_A0", "t_max", "t_points", "nodes"};
  }
  return {};
}

RunConfig from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) schema("config must be a mapping");
  reject_unknown(root, {"circuit", "task", "grids", "output", "parallelism"}, "config");
  RunConfig cfg;
  if (!root["task"]) schema("missing 'task'");
  const std::string task = text(root["task"], "task");
  bool found = false;
  for (const auto& ti : kTasks) {
    if (task == ti.name) {
      cfg.task = ti.task;
      found = true;
    }
  }
  if (!found) schema("unknown task '" + task + "'");

  if (!root["circuit"]) schema("missing 'circuit'");
  const YAML::Node c = root["circuit"];
  reject_unknown(c, {"N", "L", "C", "C_g", "C_c", "C_W", "chi", "E_C_A", "omega_A", "Z_W", "T"}, "circuit");
  for (const char* req : {"E_C_A", "omega_A"}) {
    if (!c[req]) schema(std::string("missing 'circuit.") + req + "'");
  }
  CircuitParams& p = cfg.circuit;
  if (c["N"]) p.N = integer(c["N"], "N");
  if (c["L"]) p.L = scalar_quantity(c["L"], "L", "inductance");
  if (c["C"]) p.C = scalar_quantity(c["C"], "C", "capacitance");
  if (c["C_g"]) p.C_g = scalar_quantity(c["C_g"], "C_g", "capacitance");
  if (c["C_c"]) p.C_c = scalar_quantity(c["C_c"], "C_c", "capacitance");
  if (c["C_W"]) p.C_W = scalar_quantity(c["C_W"], "C_W", "capacitance");
  if (c["chi"]) p.chi = scalar_quantity(c["chi"], "chi", "dimensionless");
  p.E_C_A = scalar_quantity(c["E_C_A"], "E_C_A", "energy");
  p.omega_A = scalar_quantity(c["omega_A"], "omega_A", "frequency");
  if (c["Z_W"]) p.Z_W = scalar_quantity(c["Z_W"], "Z_W", "resistance");
  if (c["T"]) p.T = scalar_quantity(c["T"], "T", "temperature");
  try {
    validate(p);
  } catch (const Error& e) {
    schema(std::string("invalid circuit: ") + e.what());
  }

  if (root["grids"]) {
    const YAML::Node g = root["grids"];
    reject_unknown(g, grid_keys(cfg.task), std::string("grids for task ") + task);
    if (g["chi_target"]) cfg.chi_target = scalar_quantity(g["chi_target"], "chi_target", "dimensionless");
    if (g["initial_steps"]) cfg.initial_steps = integer(g["initial_steps"], "initial_steps");
    if (g["overlap_threshold"]) {
      cfg.overlap_threshold = scalar_quantity(g["overlap_threshold"], "overlap_threshold", "dimensionless");
    }
    if (g["t_max"]) cfg.t_max = scalar_quantity(g["t_max"], "t_max", "dimensionless");
    if (g["t_points"]) cfg.t_points = integer(g["t_points"], "t_points");
    if (g["method"]) cfg.method = text(g["method"], "method");
    if (g["chi"]) cfg.chi_grid = grid(g["chi"], "chi", "dimensionless");
    if (g["omega_A"]) cfg.omega_grid = grid(g["omega_A"], "omega_A", "frequency");
    if (g["omega"]) cfg.omega_grid = grid(g["omega"], "omega", "frequency");
    if (g["Lambda"]) cfg.Lambda = scalar_quantity(g["Lambda"], "Lambda", "cubic");
    if (g["lambda_scale"]) cfg.lambda_scale = scalar_quantity(g["lambda_scale"], "lambda_scale", "dimensionless");
    if (g["phi_A0"]) cfg.phi_A0 = scalar_quantity(g["phi_A0"], "phi_A0", "flux");
    if (g["nodes"]) {
      if (!g["nodes"].IsSequence()) schema("'nodes' must be a list");
      for (const auto& v : g["nodes"]) cfg.nodes.push_back(integer(v, "nodes"));
    }
  }
  if (root["output"]) cfg.output = text(root["output"], "output");
  if (root["parallelism"]) cfg.parallelism = integer(root["parallelism"], "parallelism");

  // Task-level checks.
  if (cfg.parallelism < 1) schema("'parallelism' must be at least 1");
  if (cfg.initial_steps < 1) schema("'initial_steps' must be at least 1");
  if (!(cfg.overlap_threshold > 0.0 && cfg.overlap_threshold < 1.0)) schema("'overlap_threshold' must lie in (0, 1)");
  if (!(cfg.t_max > 0.0)) schema("'t_max' must be positive");
  if (cfg.t_points < 2) schema("'t_points' must be at least 2");
  if (cfg.method != "modal" && cfg.method != "oracle" && cfg.method != "both") {
    schema("'method' must be modal, oracle or both");
  }
  if (cfg.chi_target < 0.0) schema("'chi_target' must be non-negative");
  if (cfg.task == Task::SweepChi && cfg.chi_grid.empty()) schema("sweep-chi needs grids.chi");
  if ((cfg.task == Task::SweepOmega || cfg.task == Task::Impedance) && cfg.omega_grid.empty()) {
    schema(task + " needs a frequency grid");
  }
  for (double x : cfg.chi_grid) {
    if (!(x >= 0.0)) schema("chi grid values must be non-negative");
  }
  for (double w : cfg.omega_grid) {
    if (!(w > 0.0)) schema("frequency grid values must be positive");
  }
  const int M = p.N + 2;
  for (int node : cfg.nodes) {
    if (node < 0 || node >= M) schema("node index " + std::to_string(node) + " outside 0.." + std::to_string(M - 1));
  }
  if (cfg.task == Task::Nonlinear && cfg.nodes.empty()) cfg.nodes = {0, M - 1};
  return cfg;
}

}  // namespace

const char* task_name(Task t) {
  for (const auto& ti : kTasks) {
    if (ti.task == t) return ti.name;
  }
  return "?";
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto& a = circuit;
  const auto& b = o.circuit;
  return a.N == b.N && a.L == b.L && a.C == b.C && a.C_g == b.C_g && a.C_c == b.C_c && a.C_W == b.C_W &&
         a.chi == b.chi && a.E_C_A == b.E_C_A && a.omega_A == b.omega_A && a.Z_W == b.Z_W && a.T == b.T &&
         task == o.task && chi_target == o.chi_target && initial_steps == o.initial_steps &&
         overlap_threshold == o.overlap_threshold && t_max == o.t_max && t_points == o.t_points &&
         method == o.method && chi_grid == o.chi_grid && omega_grid == o.omega_grid && Lambda == o.Lambda &&
         lambda_scale == o.lambda_scale && phi_A0 == o.phi_A0 && nodes == o.nodes && output == o.output &&
         parallelism == o.parallelism;
}

double parse_quantity(const std::string& raw, const std::string& kind) {
  const auto& tables = unit_tables();
  const auto table = tables.find(kind);
  if (table == tables.end()) fail(ErrorKind::Domain, "unknown quantity kind " + kind);
  const char* begin = raw.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) fail(ErrorKind::Schema, "cannot read a number from '" + raw + "'");
  std::string unit(end);
  const auto first = unit.find_first_not_of(" \t");
  unit = first == std::string::npos ? "" : unit.substr(first, unit.find_last_not_of(" \t") - first + 1);
  if (!std::isfinite(v)) fail(ErrorKind::Schema, "non-finite value '" + raw + "'");
  // Bare numbers are taken as SI.
  if (unit.empty()) return v;
  const auto u = table->second.find(unit);
  if (u == table->second.end()) fail(ErrorKind::Schema, "unit '" + unit + "' is not a valid " + kind);
  return v * u->second;
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto& p = cfg.circuit;
  out << "task: " << task_name(cfg.task) << "\n";
  out << "circuit:\n";
  out << "  N: " << p.N << "\n";
  out << "  L: " << quantity(p.L, "inductance") << "\n";
  out << "  C: " << quantity(p.C, "capacitance") << "\n";
  out << "  C_g: " << quantity(p.C_g, "capacitance") << "\n";
  out << "  C_c: " << quantity(p.C_c, "capacitance") << "\n";
  out << "  C_W: " << quantity(p.C_W, "capacitance") << "\n";
  out << "  chi: " << fmt(p.chi) << "\n";
  out << "  E_C_A: " << quantity(p.E_C_A, "energy") << "\n";
  out << "  omega_A: " << quantity(p.omega_A, "frequency") << "\n";
  out << "  Z_W: " << quantity(p.Z_W, "resistance") << "\n";
  out << "  T: " << quantity(p.T, "temperature") << "\n";

  auto list = [](const std::vector<double>& v, const std::string& kind) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + quantity(v[i], kind);
    return s + "]";
  };
  std::ostringstream g;
  const auto keys = grid_keys(cfg.task);
  auto has = [&](const char* k) { return keys.count(k) > 0; };
  if (has("chi_target")) g << "  chi_target: " << fmt(cfg.chi_target) << "\n";
  if (has("initial_steps")) g << "  initial_steps: " << cfg.initial_steps << "\n";
  if (has("overlap_threshold")) g << "  overlap_threshold: " << fmt(cfg.overlap_threshold) << "\n";
  if (has("t_max")) g << "  t_max: " << fmt(cfg.t_max) << "\n";
  if (has("t_points")) g << "  t_points: " << cfg.t_points << "\n";
  if (has("method")) g << "  method: " << cfg.method << "\n";
  if (has("chi")) g << "  chi: " << list(cfg.chi_grid, "dimensionless") << "\n";
  if (has("omega_A")) g << "  omega_A: " << list(cfg.omega_grid, "frequency") << "\n";
  if (has("omega")) g << "  omega: " << list(cfg.omega_grid, "frequency") << "\n";
  if (has("Lambda")) g << "  Lambda: " << quantity(cfg.Lambda, "cubic") << "\n";
  if (has("lambda_scale")) g << "  lambda_scale: " << fmt(cfg.lambda_scale) << "\n";
  if (has("phi_A0")) g << "  phi_A0: " << quantity(cfg.phi_A0, "flux") << "\n";
  if (has("nodes")) {
    g << "  nodes: [";
    for (std::size_t i = 0; i < cfg.nodes.size(); ++i) g << (i ? ", " : "") << cfg.nodes[i];
    g << "]\n";
  }
  if (!g.str().empty()) out << "grids:\n" << g.str();
  std::string quoted;
  for (char ch : cfg.output) {
    if (ch == '"' || ch == '\\') quoted += '\\';
    quoted += ch;
  }
  out << "output: \"" << quoted << "\"\n";
  out << "parallelism: " << cfg.parallelism << "\n";
  return out.str();
}

std::string config_header(const RunConfig& cfg) {
  std::istringstream in(emit_config(cfg));
  std::string line, out = "# jjaqed resolved config\n";
  while (std::getline(in, line)) out += "# " + line + "\n";
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    schema(std::string("malformed config: ") + e.what());
  }
  try {
    return from_yaml(root);
  } catch (const YAML::Exception& e) {
    schema(std::string("malformed config: ") + e.what());
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig parse_header_of(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line, yaml;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) != 0) break;
    if (line.rfind("#:", 0) == 0) continue;  // run metadata, not config
    if (first) {
      first = false;
      continue;
    }
    yaml += line.size() >= 2 ? line.substr(2) : "";
    yaml += "\n";
  }
  return parse_config_text(yaml);
}

}  // namespace jjaqed
