// Command-line runner for the experiment configurations.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "degdiff/errors.hpp"
#include "degdiff/experiment.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<int> mesh_n;
  std::optional<double> dt;
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out, "output directory (overrides the config)");
  sub->add_option("--mesh-n", opt.mesh_n, "cells per side of the 2D mesh");
  sub->add_option("--dt", opt.dt, "time step");
}

bool kind_matches(const std::string& command, degdiff::ExperimentKind kind) {
  using K = degdiff::ExperimentKind;
  if (command == "stationary") return kind == K::Stationary1D;
  if (command == "critical") return kind == K::Critical;
  if (command == "evolve") return kind == K::Evolve2D || kind == K::Evolve1DOracle;
  if (command == "currents") return kind == K::Currents;
  if (command == "sweep") return kind == K::GapSweep;
  return false;
}

int run(const std::string& command, const Options& opt) {
  degdiff::ExperimentConfig cfg;
  try {
    cfg = degdiff::load_config(opt.config);
    if (!kind_matches(command, cfg.kind))
      throw degdiff::ConfigError("kind", "'" + std::string(degdiff::to_string(cfg.kind)) +
                                             "' cannot be run by the '" + command + "' command");
    if (!opt.out.empty()) cfg.output = opt.out;
    if (opt.mesh_n) cfg.mesh_n = *opt.mesh_n;
    if (opt.dt) cfg.dt = *opt.dt;
    degdiff::validate(cfg);
  } catch (const degdiff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  }
  try {
    const degdiff::RunResult result = degdiff::run_experiment(cfg);
    for (const auto& f : result.files) std::cout << (cfg.output / f.path).string() << '\n';
    std::cout << result.manifest.string() << '\n';
  } catch (const degdiff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate drift-diffusion experiments"};
  app.require_subcommand(1);
  Options opt;
  const std::pair<const char*, const char*> commands[] = {
      {"stationary", "stationary 1D profile by shooting"},
      {"critical", "critical boundary data of a potential"},
      {"evolve", "time evolution (2D finite elements or the 1D oracle)"},
      {"currents", "boundary currents of a 2D device run"},
      {"sweep", "asymptotic current versus boundary gap"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  return run(app.get_subcommands().front()->get_name(), opt);
}
