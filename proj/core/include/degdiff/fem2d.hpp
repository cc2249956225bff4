#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "degdiff/mesh2d.hpp"
#include "degdiff/potential.hpp"

// Linearised implicit scheme for u_t = div(u grad(u + V)) on the unit square:
//
//   (u^n - u+, phi)/dt + (u+ grad u^n, grad phi) + (u^n grad V, grad phi) = 0
//
// with u+ = max(u^{n-1}, 0), P1 elements, and test functions vanishing on the
// Dirichlet part of the boundary. Zero-flux segments contribute nothing.

namespace degdiff::fem {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct BoundaryCondition {
  enum class Kind { ZeroFlux, Dirichlet };
  Kind kind = Kind::ZeroFlux;
  double value = 0.0;

  static BoundaryCondition zero_flux() { return {Kind::ZeroFlux, 0.0}; }
  static BoundaryCondition dirichlet(double v) { return {Kind::Dirichlet, v}; }
  bool is_dirichlet() const noexcept { return kind == Kind::Dirichlet; }
};

/// One condition per boundary segment; all zero-flux by default.
class BoundarySpec {
 public:
  BoundarySpec() = default;

  BoundarySpec& set(BoundaryTag tag, BoundaryCondition c) {
    conditions_[tag_index(tag)] = c;
    return *this;
  }
  const BoundaryCondition& operator[](BoundaryTag tag) const { return conditions_[tag_index(tag)]; }
  bool has_dirichlet() const;

  /// Zero flux on Gamma1/Gamma3, u0 on Gamma4 and Gamma5, u1 on Gamma2.
  static BoundarySpec left_right(double u0, double u1);

 private:
  std::array<BoundaryCondition, 5> conditions_{};
};

/// Nodal coefficients of a P1 function on a mesh.
class Field {
 public:
  Field(const Mesh& mesh, Vector values);
  static Field interpolate(const Mesh& mesh, const std::function<double(double, double)>& f);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }
  double operator[](int i) const { return values_[i]; }

 private:
  const Mesh* mesh_;
  Vector values_;
};

/// Nodal P1 vector field (J1, J2).
struct VectorField {
  const Mesh* mesh;
  Vector x1;
  Vector x2;
};

enum class LinearSolverKind { SparseLU, BiCGSTAB };

struct StepperConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  std::vector<double> snapshot_times;
  /// Steady once max|u^n - u^{n-1}| / dt < steady_tol; 0 disables the test.
  double steady_tol = 0.0;
  bool stop_when_steady = true;
  double solver_tol = 1e-10;
  LinearSolverKind solver = LinearSolverKind::SparseLU;
  /// Coefficient of the u+ grad u term. 1 is the physical model.
  double diffusion_coefficient = 1.0;
};

/// Reduced system over the free (non-Dirichlet) nodes.
struct LinearSystem {
  SparseMatrix matrix;
  Vector rhs;
  std::vector<int> free_nodes;
};

/// Mesh geometry, boundary classification and the time-independent parts
/// (mass and drift matrices) of the scheme for one (mesh, V, bc, dt).
class Discretization {
 public:
  Discretization(const Mesh& mesh, const Potential& v, const BoundarySpec& bc, double dt,
                 double diffusion_coefficient = 1.0);

  const Mesh& mesh() const noexcept { return *mesh_; }
  double dt() const noexcept { return dt_; }
  const BoundarySpec& boundary() const noexcept { return bc_; }

  /// Node is constrained if it lies on a Dirichlet edge. Its value is the
  /// owning segment's datum when that segment is Dirichlet, otherwise the
  /// datum of the adjacent Dirichlet edge.
  bool is_dirichlet(int node) const { return node_to_free_[node] < 0; }
  double dirichlet_value(int node) const { return dirichlet_values_[node]; }
  const std::vector<int>& dirichlet_nodes() const noexcept { return dirichlet_nodes_; }
  /// Constrained nodes attributed to `tag` (owned by it, or lying on one of
  /// its edges while owned by a zero-flux segment).
  std::vector<int> dirichlet_nodes_of(BoundaryTag tag) const;

  /// Assemble the system for the step that starts from `u_prev`.
  const LinearSystem& assemble(const Vector& u_prev);

  /// Full nodal vector from the free-node solution, Dirichlet values exact.
  Vector expand(const Vector& free_solution) const;

  /// Weak-form residual of every node, tested with its nodal basis function.
  /// At a constrained node this equals minus the outward boundary flux
  /// integral of J against that basis function.
  Vector residual(const Vector& u_new, const Vector& u_prev) const;

  /// M u for the consistent P1 mass matrix.
  Vector mass_times(const Vector& u) const;

 private:
  struct Element {
    std::array<int, 3> v;
    double area;
    std::array<std::array<double, 2>, 3> grad;  // basis gradients
    std::array<std::array<double, 3>, 3> stiff;  // area * grad_i . grad_j
    std::array<std::array<double, 3>, 3> drift;  // int phi_j gradV . grad_i
  };

  const Mesh* mesh_;
  BoundarySpec bc_;
  double dt_;
  double diffusion_;
  std::vector<Element> elements_;
  std::vector<int> node_to_free_;
  std::vector<int> dirichlet_nodes_;
  std::vector<double> dirichlet_values_;
  std::vector<std::optional<BoundaryTag>> dirichlet_edge_tag_;

  LinearSystem system_;
  std::vector<double> constant_values_;  // M/dt + D in the reduced pattern
  std::vector<int> slots_;               // element-local (i,j) -> value index, -1 if column constrained
};

/// One-shot assembly for the step from `u_prev`.
LinearSystem assemble_step(const Mesh& mesh, const Field& u_prev, const Potential& v, const BoundarySpec& bc,
                           double dt);

/// Reusable solver; the sparsity pattern is analysed once.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverKind kind = LinearSolverKind::SparseLU, double tol = 1e-10);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Solution with ||A x - b|| <= tol ||b||; throws SolverError otherwise.
  Vector solve(const SparseMatrix& a, const Vector& b, const Vector* guess = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Vector solve_linear(const LinearSystem& sys, double tol = 1e-10, LinearSolverKind kind = LinearSolverKind::SparseLU);

struct Snapshot {
  double time;
  Vector values;
};

struct StepView {
  int step;
  double time;
  const Vector& u_new;
  const Vector& u_prev;
  const Discretization& disc;
};

using StepObserver = std::function<void(const StepView&)>;

struct Trajectory {
  double dt = 0.0;
  int steps = 0;
  std::vector<Snapshot> snapshots;
  /// max|u^n - u^{n-1}| / dt for n = 1..steps.
  std::vector<double> change_rates;
  std::optional<int> steady_step;
  double min_value = 0.0;  // smallest nodal value over all steps
  Vector final_values;
};

/// Runs the scheme from u_in up to cfg.t_end. Initial values on constrained
/// nodes are overwritten with the boundary datum (with a warning on stderr
/// if they disagree).
Trajectory evolve(const Mesh& mesh, const Field& u_in, const Potential& v, const BoundarySpec& bc,
                  const StepperConfig& cfg, const StepObserver& observer = {});

/// Nodal L2 projection of J = -u+ grad u_new - u_new grad V.
VectorField recover_flux(const Mesh& mesh, const Field& u_new, const Field& u_prev, const Potential& v);

struct SteadyPoint {
  int step;
  double time;
};

/// First n with max|u^n - u^{n-1}| / dt < steady_tol.
std::optional<SteadyPoint> detect_steady(const Trajectory& traj, double steady_tol);
std::optional<std::pair<int, Field>> detect_steady(std::span<const Field> states, double dt, double steady_tol);

}  // namespace degdiff::fem
