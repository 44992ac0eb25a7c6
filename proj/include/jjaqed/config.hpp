// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "jjaqed/circuit.hpp"

namespace jjaqed {

enum class Task {
  Modes,
  Jja,
  Track,
  Couplings,
  Perturbation,
  Dynamics,
  Spectrum,
  SweepChi,
  SweepOmega,
  Impedance,
  Nonlinear,
};

const char* task_name(Task t);

// Fully resolved run description, SI throughout. Fields that do not apply to
// the task keep their defaults and are not emitted.
struct RunConfig {
  CircuitParams circuit;
  Task task = Task::Modes;

  // tracking
  double chi_target = 0.0;
  int initial_steps = 8;
  double overlap_threshold = 0.5;

  // time grids (dimensionless Omega0 t)
  double t_max = 500.0;
  int t_points = 2001;
  std::string method = "modal";  // modal | oracle | both

  std::vector<double> chi_grid;
  std::vector<double> omega_grid;  // rad/s, for sweep-omega and impedance

  // nonlinear
  double Lambda = 0.0;
  double lambda_scale = 1.0;
  double phi_A0 = 0.0;  // weber
  std::vector<int> nodes;

  std::string output = ".";
  int parallelism = 1;

  bool operator==(const RunConfig&) const;
};

// Parse errors are schema errors (exit code 2).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Quantity parsing, exposed for tests. `kind` is one of inductance,
// capacitance, frequency (returns rad/s), energy, temperature, resistance,
// flux, dimensionless.
double parse_quantity(const std::string& text, const std::string& kind);

// Deterministic YAML of the resolved config with %.17g SI values.
std::string emit_config(const RunConfig& cfg);

// Same text with every line prefixed by "# ".
std::string config_header(const RunConfig& cfg);

// Recovers the config from a file written by the runner.
RunConfig parse_header_of(const std::string& csv_text);

}  // namespace jjaqed
