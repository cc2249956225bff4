#include "degdiff/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "degdiff/csv.hpp"
#include "degdiff/errors.hpp"
#include "degdiff/observables.hpp"
#include "degdiff/oracle1d.hpp"
#include "degdiff/potential.hpp"
#include "degdiff/stationary1d.hpp"

namespace degdiff {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<std::string, ExperimentKind, std::less<>> kKinds = {
    {"stationary1d", ExperimentKind::Stationary1D}, {"critical", ExperimentKind::Critical},
    {"evolve1d-oracle", ExperimentKind::Evolve1DOracle}, {"evolve2d", ExperimentKind::Evolve2D},
    {"currents", ExperimentKind::Currents},         {"gap-sweep", ExperimentKind::GapSweep},
};

const char* tag_key(BoundaryTag t) {
  static const char* names[] = {"gamma1", "gamma2", "gamma3", "gamma4", "gamma5"};
  return names[tag_index(t)];
}

bool is_2d(ExperimentKind k) {
  return k == ExperimentKind::Evolve2D || k == ExperimentKind::Currents || k == ExperimentKind::GapSweep;
}

double number_at(const json& j, const std::string& key, const std::string& path) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path + "." + key, "must be finite");
  return d;
}

template <typename T>
void read_number(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  const double v = number_at(j, key, "");
  if constexpr (std::is_integral_v<T>) {
    if (v != std::floor(v)) throw ConfigError(key, "expected an integer");
  }
  out = static_cast<T>(v);
}

std::string string_at(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

fem::BoundarySpec parse_boundary(const json& j) {
  if (!j.is_object()) throw ConfigError("boundary", "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (BoundaryTag t : kAllTags) known = known || item.key() == tag_key(t);
    if (!known) throw ConfigError("boundary." + item.key(), "unknown boundary segment");
  }
  fem::BoundarySpec bc;
  for (BoundaryTag t : kAllTags) {
    const std::string path = std::string("boundary.") + tag_key(t);
    if (!j.contains(tag_key(t))) throw ConfigError(path, "missing condition");
    const json& c = j.at(tag_key(t));
    if (c.is_string() && c.get<std::string>() == "zero-flux") {
      bc.set(t, fem::BoundaryCondition::zero_flux());
    } else if (c.is_object() && c.size() == 1 && c.contains("dirichlet")) {
      const double v = number_at(c, "dirichlet", path);
      if (!(v > 0.0)) throw ConfigError(path + ".dirichlet", "Dirichlet value must be positive");
      bc.set(t, fem::BoundaryCondition::dirichlet(v));
    } else {
      throw ConfigError(path, "expected \"zero-flux\" or {\"dirichlet\": value}");
    }
  }
  return bc;
}

json boundary_json(const fem::BoundarySpec& bc) {
  json j = json::object();
  for (BoundaryTag t : kAllTags) {
    if (bc[t].is_dirichlet())
      j[tag_key(t)] = {{"dirichlet", bc[t].value}};
    else
      j[tag_key(t)] = "zero-flux";
  }
  return j;
}

void check_expression(const std::string& text, const char* path, int dimension) {
  try {
    Potential::parse(text, dimension);
  } catch (const ParseError& e) {
    throw ConfigError(path, std::string(e.what()) + " (offset " + std::to_string(e.offset()) + ")");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  std::ofstream open(const fs::path& rel, std::string description) {
    std::ofstream out(root_ / rel);
    if (!out) throw std::runtime_error("cannot write " + (root_ / rel).string());
    files_.push_back({rel, std::move(description)});
    return out;
  }
  const fs::path& root() const { return root_; }
  std::vector<OutputFile>& files() { return files_; }

 private:
  fs::path root_;
  std::vector<OutputFile> files_;
};

std::string snapshot_name(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "snapshot_" + digits + ".csv";
}

// Left/right Dirichlet data of a boundary map that is constant along the
// left edge, zero-flux on top and bottom: the x2-homogeneous device.
std::optional<stationary::DirichletPair> device_data(const fem::BoundarySpec& bc) {
  const auto& g4 = bc[BoundaryTag::Gamma4];
  const auto& g5 = bc[BoundaryTag::Gamma5];
  const auto& g2 = bc[BoundaryTag::Gamma2];
  if (bc[BoundaryTag::Gamma1].is_dirichlet() || bc[BoundaryTag::Gamma3].is_dirichlet()) return std::nullopt;
  if (!g4.is_dirichlet() || !g5.is_dirichlet() || !g2.is_dirichlet() || g4.value != g5.value) return std::nullopt;
  return stationary::DirichletPair{g4.value, g2.value};
}

bool has_device_currents(const fem::BoundarySpec& bc) {
  return bc[BoundaryTag::Gamma2].is_dirichlet() &&
         (bc[BoundaryTag::Gamma4].is_dirichlet() || bc[BoundaryTag::Gamma5].is_dirichlet());
}

void write_snapshot(std::ostream& os, const Mesh& mesh, const fem::Vector& u) {
  os << "x1,x2,u\n";
  for (std::size_t k = 0; k < mesh.num_vertices(); ++k)
    write_csv_row(os, {mesh.vertices[k].x1, mesh.vertices[k].x2, u[static_cast<Eigen::Index>(k)]});
}

struct Evolve2DOutcome {
  TimeSeries l1{"l1"};
  TimeSeries j_left{"J_L"};
  TimeSeries j_right{"J_R"};
  TimeSeries relative_change{"relative_change"};
  fem::Trajectory trajectory;
  std::optional<Mesh> mesh;
};

Evolve2DOutcome run_2d(const ExperimentConfig& cfg, const Potential& v, const fem::BoundarySpec& bc,
                       const std::function<double(double, double)>& u_in, bool currents) {
  Evolve2DOutcome out;
  out.mesh = build_structured(cfg.mesh_n, cfg.mesh_pattern);
  const Mesh& mesh = *out.mesh;
  fem::StepperConfig sc;
  sc.dt = cfg.dt;
  sc.t_end = cfg.t_end;
  sc.snapshot_times = cfg.snapshot_times;
  sc.steady_tol = cfg.steady_tol;
  sc.stop_when_steady = cfg.stop_when_steady;
  sc.solver = cfg.solver;
  sc.solver_tol = cfg.solver_tol;
  sc.diffusion_coefficient = cfg.diffusion_coefficient;

  const fem::Field initial = fem::Field::interpolate(mesh, u_in);
  out.l1.record(0.0, l1_norm(mesh, initial.values()));
  out.trajectory = fem::evolve(mesh, initial, v, bc, sc, [&](const fem::StepView& s) {
    out.l1.record(s.time, l1_norm(mesh, s.u_new));
    const double scale = s.u_new.lpNorm<Eigen::Infinity>();
    out.relative_change.record(s.time, (s.u_new - s.u_prev).lpNorm<Eigen::Infinity>() / (scale > 0.0 ? scale : 1.0));
    if (currents) {
      const Currents c = device_currents(s);
      out.j_left.record(s.time, c.left);
      out.j_right.record(s.time, c.right);
    }
  });
  return out;
}

void write_two_series(std::ostream& os, const TimeSeries& a, const TimeSeries& b) {
  os << "t," << a.name() << ',' << b.name() << '\n';
  for (std::size_t i = 0; i < a.size(); ++i)
    write_csv_row(os, {a.samples()[i].first, a.samples()[i].second, b.samples()[i].second});
}

std::function<double(double, double)> initial_function(const std::string& text) {
  auto p = std::make_shared<Potential>(Potential::parse(text, 2));
  return [p](double x1, double x2) { return (*p)(x1, x2); };
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kKinds)
    if (k == kind) return name;
  return "unknown";
}

std::vector<double> SweepParams::values() const {
  const long rows = std::lround((a_max - a_min) / da);
  std::vector<double> a;
  for (long k = 0; k <= rows; ++k) a.push_back(a_min + k * da);
  return a;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "top level must be an object");

  static const std::vector<std::string> known = {
      "kind",   "name",       "potential",  "initial",        "u0",          "u1",
      "boundary", "dt",       "t_end",      "mesh_n",         "mesh_pattern", "solver",
      "solver_tol", "snapshot_times", "steady_tol", "stop_when_steady", "diffusion_coefficient", "nx",
      "grid_points", "sweep", "output"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw ConfigError(item.key(), "unknown field");

  ExperimentConfig cfg;
  if (!j.contains("kind")) throw ConfigError("kind", "missing");
  const std::string kind = string_at(j, "kind");
  const auto it = kKinds.find(kind);
  if (it == kKinds.end()) throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
  cfg.kind = it->second;
  if (j.contains("name")) cfg.name = string_at(j, "name");
  if (j.contains("potential")) cfg.potential = string_at(j, "potential");
  if (j.contains("initial")) cfg.initial = string_at(j, "initial");
  if (j.contains("u0")) cfg.u0 = number_at(j, "u0", "");
  if (j.contains("u1")) cfg.u1 = number_at(j, "u1", "");
  if (j.contains("boundary")) cfg.boundary = parse_boundary(j.at("boundary"));
  read_number(j, "dt", cfg.dt);
  read_number(j, "t_end", cfg.t_end);
  read_number(j, "mesh_n", cfg.mesh_n);
  read_number(j, "solver_tol", cfg.solver_tol);
  read_number(j, "steady_tol", cfg.steady_tol);
  read_number(j, "diffusion_coefficient", cfg.diffusion_coefficient);
  read_number(j, "nx", cfg.nx);
  read_number(j, "grid_points", cfg.grid_points);
  if (j.contains("mesh_pattern")) {
    const std::string p = string_at(j, "mesh_pattern");
    if (p == "single-diagonal")
      cfg.mesh_pattern = MeshPattern::SingleDiagonal;
    else if (p == "crossed")
      cfg.mesh_pattern = MeshPattern::Crossed;
    else
      throw ConfigError("mesh_pattern", "expected \"single-diagonal\" or \"crossed\"");
  }
  if (j.contains("solver")) {
    const std::string s = string_at(j, "solver");
    if (s == "sparse-lu")
      cfg.solver = fem::LinearSolverKind::SparseLU;
    else if (s == "bicgstab")
      cfg.solver = fem::LinearSolverKind::BiCGSTAB;
    else
      throw ConfigError("solver", "expected \"sparse-lu\" or \"bicgstab\"");
  }
  if (j.contains("stop_when_steady")) {
    if (!j.at("stop_when_steady").is_boolean()) throw ConfigError("stop_when_steady", "expected a boolean");
    cfg.stop_when_steady = j.at("stop_when_steady").get<bool>();
  }
  if (j.contains("snapshot_times")) {
    const json& s = j.at("snapshot_times");
    if (!s.is_array()) throw ConfigError("snapshot_times", "expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number()) throw ConfigError("snapshot_times[" + std::to_string(i) + "]", "expected a number");
      cfg.snapshot_times.push_back(s[i].get<double>());
    }
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("sweep", "expected an object");
    SweepParams sp;
    for (const auto& item : s.items()) {
      const std::string& k = item.key();
      double* target = k == "a_min" ? &sp.a_min
                       : k == "a_max" ? &sp.a_max
                       : k == "da" ? &sp.da
                       : k == "t_final" ? &sp.t_final
                       : k == "base" ? &sp.base
                       : nullptr;
      if (!target) throw ConfigError("sweep." + k, "unknown field");
      *target = number_at(s, k, "sweep");
    }
    cfg.sweep = sp;
  }
  if (j.contains("output")) cfg.output = string_at(j, "output");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("", "cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.potential.empty()) throw ConfigError("potential", "missing");
  const int dim = is_2d(cfg.kind) ? 2 : 1;
  check_expression(cfg.potential, "potential", dim);

  const bool one_d_data = cfg.kind == ExperimentKind::Stationary1D || cfg.kind == ExperimentKind::Evolve1DOracle;
  if (one_d_data) {
    if (!cfg.u0) throw ConfigError("u0", "missing");
    if (!cfg.u1) throw ConfigError("u1", "missing");
    if (!(*cfg.u0 > 0.0)) throw ConfigError("u0", "must be positive");
    if (!(*cfg.u1 > 0.0)) throw ConfigError("u1", "must be positive");
  }
  if (cfg.kind == ExperimentKind::Stationary1D && cfg.grid_points < 5)
    throw ConfigError("grid_points", "need at least 5 points");

  const bool evolves = cfg.kind == ExperimentKind::Evolve1DOracle || cfg.kind == ExperimentKind::Evolve2D ||
                       cfg.kind == ExperimentKind::Currents;
  if (evolves) {
    if (cfg.initial.empty()) throw ConfigError("initial", "missing");
    check_expression(cfg.initial, "initial", dim);
  }
  if (evolves || cfg.kind == ExperimentKind::GapSweep) {
    if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (!(cfg.solver_tol > 0.0)) throw ConfigError("solver_tol", "must be positive");
    if (cfg.steady_tol < 0.0) throw ConfigError("steady_tol", "must be non-negative");
  }
  if (evolves) {
    if (!(cfg.t_end >= cfg.dt)) throw ConfigError("t_end", "must be at least dt");
    for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
      const double ts = cfg.snapshot_times[i];
      const double k = std::round(ts / cfg.dt);
      if (ts < 0.0 || ts > cfg.t_end + 1e-12 || std::abs(k * cfg.dt - ts) > 1e-12 + 1e-9 * cfg.dt)
        throw ConfigError("snapshot_times[" + std::to_string(i) + "]", "not a multiple of dt within [0, t_end]");
    }
  }
  if (is_2d(cfg.kind)) {
    if (cfg.mesh_n < 2 || cfg.mesh_n % 2 != 0) throw ConfigError("mesh_n", "must be even and at least 2");
    if (!(cfg.diffusion_coefficient > 0.0)) throw ConfigError("diffusion_coefficient", "must be positive");
  }
  if (cfg.kind == ExperimentKind::Evolve2D || cfg.kind == ExperimentKind::Currents) {
    if (!cfg.boundary) throw ConfigError("boundary", "missing");
    if (!cfg.boundary->has_dirichlet()) throw ConfigError("boundary", "at least one segment must be Dirichlet");
  }
  if (cfg.kind == ExperimentKind::Currents && !has_device_currents(*cfg.boundary))
    throw ConfigError("boundary", "currents need Dirichlet data on gamma2 and on gamma4 or gamma5");
  if (cfg.kind == ExperimentKind::Evolve1DOracle && cfg.nx < 2) throw ConfigError("nx", "must be at least 2");
  if (cfg.kind == ExperimentKind::GapSweep) {
    if (!cfg.sweep) throw ConfigError("sweep", "missing");
    const SweepParams& s = *cfg.sweep;
    if (!(s.da > 0.0)) throw ConfigError("sweep.da", "must be positive");
    if (!(s.a_max >= s.a_min)) throw ConfigError("sweep.a_max", "range is empty");
    if (s.a_min < 0.0) throw ConfigError("sweep.a_min", "must be non-negative");
    if (!(s.base > 0.0)) throw ConfigError("sweep.base", "must be positive");
    if (!(s.t_final >= cfg.dt)) throw ConfigError("sweep.t_final", "must be at least dt");
  }
}

std::string to_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = std::string(to_string(cfg.kind));
  j["name"] = cfg.name;
  j["potential"] = cfg.potential;
  j["initial"] = cfg.initial;
  if (cfg.u0) j["u0"] = *cfg.u0;
  if (cfg.u1) j["u1"] = *cfg.u1;
  if (cfg.boundary) j["boundary"] = boundary_json(*cfg.boundary);
  j["dt"] = cfg.dt;
  j["t_end"] = cfg.t_end;
  j["mesh_n"] = cfg.mesh_n;
  j["mesh_pattern"] = cfg.mesh_pattern == MeshPattern::Crossed ? "crossed" : "single-diagonal";
  j["solver"] = cfg.solver == fem::LinearSolverKind::BiCGSTAB ? "bicgstab" : "sparse-lu";
  j["solver_tol"] = cfg.solver_tol;
  j["snapshot_times"] = cfg.snapshot_times;
  j["steady_tol"] = cfg.steady_tol;
  j["stop_when_steady"] = cfg.stop_when_steady;
  j["diffusion_coefficient"] = cfg.diffusion_coefficient;
  j["nx"] = cfg.nx;
  j["grid_points"] = cfg.grid_points;
  if (cfg.sweep)
    j["sweep"] = {{"a_min", cfg.sweep->a_min},
                  {"a_max", cfg.sweep->a_max},
                  {"da", cfg.sweep->da},
                  {"t_final", cfg.sweep->t_final},
                  {"base", cfg.sweep->base}};
  j["output"] = cfg.output.string();
  return j.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<SweepRow> gap_sweep(const ExperimentConfig& base) {
  validate(base);
  if (!base.sweep) throw ConfigError("sweep", "missing");
  const SweepParams& sp = *base.sweep;
  const Potential v = Potential::parse(base.potential, 2);
  const Mesh mesh = build_structured(base.mesh_n, base.mesh_pattern);
  std::vector<SweepRow> rows;
  for (double a : sp.values()) {
    SweepRow row{a, 0.0, 0.0, 0.0, 0.0, false, {}};
    try {
      const double u0 = sp.base + a;
      const fem::BoundarySpec bc = fem::BoundarySpec::left_right(u0, sp.base);
      fem::StepperConfig sc;
      sc.dt = base.dt;
      sc.t_end = sp.t_final;
      sc.solver = base.solver;
      sc.solver_tol = base.solver_tol;
      sc.diffusion_coefficient = base.diffusion_coefficient;
      sc.steady_tol = base.steady_tol;
      sc.stop_when_steady = base.stop_when_steady;
      Currents last{0.0, 0.0};
      const fem::Field initial =
          fem::Field::interpolate(mesh, [&](double x1, double) { return sp.base + a * (1.0 - x1); });
      fem::evolve(mesh, initial, v, bc, sc, [&](const fem::StepView& s) {
        const int n = static_cast<int>(std::lround(sp.t_final / base.dt));
        // Currents are needed at the final step only, or at the step where
        // an early steady stop fires.
        if (s.step == n || (sc.steady_tol > 0.0 && sc.stop_when_steady)) last = device_currents(s);
      });
      row.j_left = last.left;
      row.j_right = last.right;
      row.j = 0.5 * (last.left + last.right);
      row.discrepancy = std::abs(last.left - last.right);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      std::cerr << "gap sweep: row a=" << format_real(a) << " failed: " << e.what() << '\n';
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "a,J,J_L,J_R,discrepancy,status\n";
  for (const SweepRow& r : rows) {
    os << format_real(r.a) << ',';
    if (r.ok) {
      os << format_real(r.j) << ',' << format_real(r.j_left) << ',' << format_real(r.j_right) << ','
         << format_real(r.discrepancy) << ",ok\n";
    } else {
      os << ",,,," << csv_escape("failed: " + r.error) << '\n';
    }
  }
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  OutputDir out(cfg.output);
  json summary = json::object();
  json snapshots = json::array();

  switch (cfg.kind) {
    case ExperimentKind::Critical: {
      const Potential v = Potential::parse(cfg.potential, 1);
      const stationary::CriticalValues cv = stationary::critical_values(v);
      auto os = out.open("critical.csv", "critical boundary data and potential extremes");
      os << "u0_crit,u1_crit,v_max,argmax,v_left,v_right\n";
      write_csv_row(os, {cv.u0_crit, cv.u1_crit, cv.v_max, cv.argmax, cv.v_left, cv.v_right});
      summary["u0_crit"] = cv.u0_crit;
      summary["u1_crit"] = cv.u1_crit;
      if (cfg.u0) summary["u0_supercritical"] = *cfg.u0 > cv.u0_crit;
      if (cfg.u1) summary["u1_supercritical"] = *cfg.u1 > cv.u1_crit;
      break;
    }
    case ExperimentKind::Stationary1D: {
      const Potential v = Potential::parse(cfg.potential, 1);
      stationary::ShootingOptions opt;
      opt.grid_points = cfg.grid_points;
      const stationary::StationaryProfile p = stationary::solve_bvp({*cfg.u0, *cfg.u1}, v, opt);
      auto os = out.open("profile.csv", "stationary profile with flux constant c");
      stationary::write_profile_csv(os, p);
      summary["c"] = p.c;
      summary["current"] = stationary::stationary_current(p);
      break;
    }
    case ExperimentKind::Evolve1DOracle: {
      const Potential v = Potential::parse(cfg.potential, 1);
      const auto u_in = initial_function(cfg.initial);
      std::vector<double> times = cfg.snapshot_times;
      std::sort(times.begin(), times.end());
      if (times.empty() || std::abs(times.back() - cfg.t_end) > 1e-12) times.push_back(cfg.t_end);
      oracle::Grid1D g;
      double t = 0.0;
      std::function<double(double)> current = [&](double x) { return u_in(x, 0.0); };
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > t) {
          g = oracle::fd_evolve_1d(current, *cfg.u0, *cfg.u1, v, cfg.nx, cfg.dt, times[i] - t);
          t = times[i];
          const oracle::Grid1D snap = g;
          current = [snap](double x) { return snap.u[static_cast<std::size_t>(std::lround(x * snap.nx))]; };
        } else if (g.u.empty()) {
          g = oracle::fd_evolve_1d(current, *cfg.u0, *cfg.u1, v, cfg.nx, cfg.dt, 0.0);
        }
        g.t = times[i];
        const std::string file = snapshot_name(i);
        auto os = out.open(file, "oracle profile at t=" + format_real(times[i]));
        oracle::write_profile_csv(os, g);
        snapshots.push_back({{"time", times[i]}, {"file", file}});
      }
      try {
        const stationary::StationaryProfile p = stationary::solve_bvp({*cfg.u0, *cfg.u1}, v);
        auto os = out.open("asymptote.csv", "stationary profile for the same data");
        stationary::write_profile_csv(os, p);
        summary["stationary_c"] = p.c;
      } catch (const NotCoveredError& e) {
        summary["stationary_c"] = nullptr;
      }
      break;
    }
    case ExperimentKind::Evolve2D:
    case ExperimentKind::Currents: {
      const Potential v = Potential::parse(cfg.potential, 2);
      const fem::BoundarySpec& bc = *cfg.boundary;
      const bool currents = has_device_currents(bc);
      Evolve2DOutcome run = run_2d(cfg, v, bc, initial_function(cfg.initial), currents);
      const Mesh& mesh = *run.mesh;
      for (std::size_t i = 0; i < run.trajectory.snapshots.size(); ++i) {
        const fem::Snapshot& s = run.trajectory.snapshots[i];
        const std::string file = snapshot_name(i);
        auto os = out.open(file, "density at t=" + format_real(s.time));
        write_snapshot(os, mesh, s.values);
        snapshots.push_back({{"time", s.time}, {"file", file}});
      }
      {
        auto os = out.open("l1.csv", "L1 norm of the density versus time");
        run.l1.write_csv(os);
      }
      {
        auto os = out.open("step_change.csv", "relative sup-norm change per step");
        run.relative_change.write_csv(os);
      }
      if (currents) {
        auto os = out.open("currents.csv", "reported boundary currents versus time");
        write_two_series(os, run.j_left, run.j_right);
        summary["J_L"] = run.j_left.samples().back().second;
        summary["J_R"] = run.j_right.samples().back().second;
      }
      const auto pair = device_data(bc);
      const Expr pot = Potential::parse(cfg.potential, 2).expression();
      if (pair && !depends_on(*pot, Variable::X2)) {
        try {
          const Potential v1 = Potential::parse(cfg.potential, 1);
          stationary::ShootingOptions opt;
          opt.grid_points = cfg.grid_points;
          const stationary::StationaryProfile p = stationary::solve_bvp(*pair, v1, opt);
          auto os = out.open("asymptote.csv", "one-dimensional stationary profile for the same data");
          stationary::write_profile_csv(os, p);
          summary["stationary_current"] = stationary::stationary_current(p);
        } catch (const NotCoveredError&) {
          summary["stationary_current"] = nullptr;
        }
      }
      summary["steps"] = run.trajectory.steps;
      summary["min_value"] = run.trajectory.min_value;
      if (run.trajectory.steady_step)
        summary["steady_time"] = *run.trajectory.steady_step * cfg.dt;
      else
        summary["steady_time"] = nullptr;
      break;
    }
    case ExperimentKind::GapSweep: {
      const std::vector<SweepRow> rows = gap_sweep(cfg);
      auto os = out.open("sweep.csv", "asymptotic current versus gap parameter");
      write_sweep_csv(os, rows);
      std::size_t failed = 0;
      for (const SweepRow& r : rows) failed += r.ok ? 0 : 1;
      summary["rows"] = rows.size();
      summary["failed_rows"] = failed;
      break;
    }
  }

  json manifest;
  manifest["kind"] = std::string(to_string(cfg.kind));
  manifest["config"] = json::parse(to_json(cfg));
  manifest["config_hash"] = config_hash(cfg);
  manifest["files"] = json::array();
  for (const OutputFile& f : out.files())
    manifest["files"].push_back({{"path", f.path.string()}, {"description", f.description}});
  if (!snapshots.empty()) manifest["snapshots"] = snapshots;
  manifest["summary"] = summary;
  const fs::path manifest_path = out.root() / "run_manifest.json";
  std::ofstream mf(manifest_path);
  if (!mf) throw std::runtime_error("cannot write " + manifest_path.string());
  mf << manifest.dump(2) << '\n';
  return RunResult{out.files(), manifest_path};
}

}  // namespace degdiff
