// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jjaqed/config.hpp"
#include "jjaqed/errors.hpp"
#include "jjaqed/runner.hpp"

namespace {

int report(const jjaqed::Error& e) {
  std::cerr << "error: " << jjaqed::error_kind_name(e.kind()) << ": " << e.what() << "\n";
  return jjaqed::exit_code(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atom + Josephson junction array + waveguide simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> workers;
  std::optional<std::string> output;
  bool validate_only = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "YAML run configuration")->required();
    cmd->add_option("--workers", workers, "worker threads (overrides parallelism)")->check(CLI::PositiveNumber);
    cmd->add_option("--output", output, "output directory (overrides output)");
    cmd->add_flag("--validate", validate_only, "check the config and exit");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "run the configured task");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "independent grid points on a worker pool");
  add_common(run_cmd);
  add_common(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    jjaqed::RunConfig cfg = jjaqed::parse_config_file(config_path);
    if (workers) cfg.parallelism = *workers;
    if (output) cfg.output = *output;
    if (validate_only) {
      std::cout << jjaqed::emit_config(cfg);
      return 0;
    }
    const auto files = sweep_cmd->parsed() ? jjaqed::sweep(cfg) : jjaqed::run(cfg);
    for (const auto& f : files) std::cout << f << "\n";
    return 0;
  } catch (const jjaqed::TrackingError& e) {
    std::cerr << "error: " << jjaqed::error_kind_name(e.kind()) << ": " << e.what() << " (chi = " << e.chi() << ")\n";
    return jjaqed::exit_code(e.kind());
  } catch (const jjaqed::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
}
