#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "degdiff/fem2d.hpp"
#include "degdiff/mesh2d.hpp"

namespace degdiff {

enum class ExperimentKind { Stationary1D, Critical, Evolve1DOracle, Evolve2D, Currents, GapSweep };

std::string_view to_string(ExperimentKind kind);

struct SweepParams {
  double a_min = 0.0;
  double a_max = 3.0;
  double da = 0.05;
  double t_final = 2.5;
  /// Right datum and offset of the left one: u0 = base + a, u1 = base.
  double base = 0.5;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Evolve2D;
  std::string name;
  std::string potential;
  std::string initial;  // u_in(x1, x2); empty for kinds that do not evolve
  /// Dirichlet data of the one-dimensional kinds.
  std::optional<double> u0;
  std::optional<double> u1;
  /// All five segments for the two-dimensional kinds.
  std::optional<fem::BoundarySpec> boundary;

  double dt = 1e-3;
  double t_end = 1.0;
  int mesh_n = 100;
  MeshPattern mesh_pattern = MeshPattern::SingleDiagonal;
  fem::LinearSolverKind solver = fem::LinearSolverKind::SparseLU;
  double solver_tol = 1e-10;
  std::vector<double> snapshot_times;
  double steady_tol = 0.0;
  bool stop_when_steady = false;
  double diffusion_coefficient = 1.0;
  int nx = 400;            // oracle grid
  int grid_points = 1001;  // stationary profile samples
  std::optional<SweepParams> sweep;
  std::filesystem::path output = "out";
};

/// Parses and validates a JSON document. Errors are ConfigError with the
/// offending field path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Throws ConfigError if the configuration is inconsistent for its kind.
void validate(const ExperimentConfig& cfg);

/// Canonical JSON rendering of a configuration (sorted keys).
std::string to_json(const ExperimentConfig& cfg);

/// FNV-1a hash of to_json(cfg), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct OutputFile {
  std::filesystem::path path;  // relative to the output directory
  std::string description;
};

struct RunResult {
  std::vector<OutputFile> files;  // excludes the manifest itself
  std::filesystem::path manifest;
};

/// Runs the experiment, writing CSV artifacts and run_manifest.json into
/// cfg.output.
RunResult run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  double a;
  double j;  // mean of reported left and right currents
  double j_left;
  double j_right;
  double discrepancy;  // |j_left - j_right|
  bool ok;
  std::string error;
};

/// Asymptotic current versus the gap parameter a. A failed row is recorded
/// and the sweep continues.
std::vector<SweepRow> gap_sweep(const ExperimentConfig& base);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace degdiff
