#include "degdiff/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "degdiff/errors.hpp"

namespace degdiff::fem {

bool BoundarySpec::has_dirichlet() const {
  return std::any_of(conditions_.begin(), conditions_.end(), [](const BoundaryCondition& c) { return c.is_dirichlet(); });
}

BoundarySpec BoundarySpec::left_right(double u0, double u1) {
  BoundarySpec bc;
  bc.set(BoundaryTag::Gamma2, BoundaryCondition::dirichlet(u1))
      .set(BoundaryTag::Gamma4, BoundaryCondition::dirichlet(u0))
      .set(BoundaryTag::Gamma5, BoundaryCondition::dirichlet(u0));
  return bc;
}

Field::Field(const Mesh& mesh, Vector values) : mesh_(&mesh), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
    throw std::invalid_argument("Field: coefficient count does not match the vertex count");
}

Field Field::interpolate(const Mesh& mesh, const std::function<double(double, double)>& f) {
  Vector values(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t k = 0; k < mesh.num_vertices(); ++k) values[k] = f(mesh.vertices[k].x1, mesh.vertices[k].x2);
  return Field(mesh, std::move(values));
}

Discretization::Discretization(const Mesh& mesh, const Potential& v, const BoundarySpec& bc, double dt,
                               double diffusion_coefficient)
    : mesh_(&mesh), bc_(bc), dt_(dt), diffusion_(diffusion_coefficient) {
  if (!(dt > 0.0)) throw std::invalid_argument("Discretization: dt must be positive");
  const int nv = static_cast<int>(mesh.num_vertices());

  elements_.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Element e;
    e.v = mesh.triangles[t];
    e.area = mesh.triangle_area(static_cast<int>(t));
    std::array<Point, 3> p{mesh.vertices[e.v[0]], mesh.vertices[e.v[1]], mesh.vertices[e.v[2]]};
    for (int i = 0; i < 3; ++i) {
      const Point& pj = p[(i + 1) % 3];
      const Point& pk = p[(i + 2) % 3];
      e.grad[i] = {(pj.x2 - pk.x2) / (2.0 * e.area), (pk.x1 - pj.x1) / (2.0 * e.area)};
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        e.stiff[i][j] = e.area * (e.grad[i][0] * e.grad[j][0] + e.grad[i][1] * e.grad[j][1]);
    // Edge-midpoint rule; the midpoint opposite vertex q has phi_q = 0 and
    // phi = 1/2 at the two other vertices.
    for (auto& row : e.drift) row.fill(0.0);
    for (int q = 0; q < 3; ++q) {
      const Point& a = p[(q + 1) % 3];
      const Point& b = p[(q + 2) % 3];
      const double mx = 0.5 * (a.x1 + b.x1);
      const double my = 0.5 * (a.x2 + b.x2);
      const double g1 = v.d1(mx, my);
      const double g2 = v.dimension() == 2 ? v.d2(mx, my) : 0.0;
      for (int i = 0; i < 3; ++i) {
        const double flux = g1 * e.grad[i][0] + g2 * e.grad[i][1];
        for (int j = 0; j < 3; ++j) {
          if (j == q) continue;
          e.drift[i][j] += (e.area / 3.0) * 0.5 * flux;
        }
      }
    }
    elements_.push_back(e);
  }

  // Constrained nodes: endpoints of every Dirichlet edge.
  dirichlet_values_.assign(nv, 0.0);
  dirichlet_edge_tag_.assign(nv, std::nullopt);
  std::vector<bool> constrained(nv, false);
  for (const BoundaryEdge& edge : mesh.boundary_edges) {
    if (!bc[edge.tag].is_dirichlet()) continue;
    for (int node : edge.v) {
      if (!dirichlet_edge_tag_[node]) dirichlet_edge_tag_[node] = edge.tag;
      constrained[node] = true;
    }
  }
  node_to_free_.assign(nv, -1);
  int free_count = 0;
  for (int k = 0; k < nv; ++k) {
    if (!constrained[k]) {
      node_to_free_[k] = free_count++;
      system_.free_nodes.push_back(k);
      continue;
    }
    const std::optional<BoundaryTag>& owner = mesh.vertex_tags[k];
    const BoundaryTag source = (owner && bc[*owner].is_dirichlet()) ? *owner : *dirichlet_edge_tag_[k];
    dirichlet_values_[k] = bc[source].value;
    dirichlet_nodes_.push_back(k);
  }

  // Reduced sparsity pattern and element slots.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(elements_.size() * 9);
  for (const Element& e : elements_)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int fi = node_to_free_[e.v[i]];
        const int fj = node_to_free_[e.v[j]];
        if (fi >= 0 && fj >= 0) triplets.emplace_back(fi, fj, 0.0);
      }
  system_.matrix.resize(free_count, free_count);
  system_.matrix.setFromTriplets(triplets.begin(), triplets.end());
  system_.matrix.makeCompressed();
  system_.rhs.setZero(free_count);

  const int* outer = system_.matrix.outerIndexPtr();
  const int* inner = system_.matrix.innerIndexPtr();
  auto locate = [&](int row, int col) {
    const int* begin = inner + outer[col];
    const int* end = inner + outer[col + 1];
    const int* it = std::lower_bound(begin, end, row);
    return static_cast<int>(it - inner);
  };
  slots_.assign(elements_.size() * 9, -1);
  constant_values_.assign(static_cast<std::size_t>(system_.matrix.nonZeros()), 0.0);
  for (std::size_t t = 0; t < elements_.size(); ++t) {
    const Element& e = elements_[t];
    for (int i = 0; i < 3; ++i) {
      const int fi = node_to_free_[e.v[i]];
      if (fi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int fj = node_to_free_[e.v[j]];
        if (fj < 0) continue;
        const int slot = locate(fi, fj);
        slots_[t * 9 + i * 3 + j] = slot;
        const double mass = e.area / 12.0 * (i == j ? 2.0 : 1.0);
        constant_values_[slot] += mass / dt_ + e.drift[i][j];
      }
    }
  }
}

std::vector<int> Discretization::dirichlet_nodes_of(BoundaryTag tag) const {
  std::vector<int> out;
  for (int k : dirichlet_nodes_) {
    const std::optional<BoundaryTag>& owner = mesh_->vertex_tags[k];
    const bool owned = owner && *owner == tag;
    bool adopted = false;
    if (!(owner && bc_[*owner].is_dirichlet())) {
      for (const BoundaryEdge& edge : mesh_->boundary_edges)
        if (edge.tag == tag && (edge.v[0] == k || edge.v[1] == k)) adopted = true;
    }
    if (owned || adopted) out.push_back(k);
  }
  return out;
}

const LinearSystem& Discretization::assemble(const Vector& u_prev) {
  if (u_prev.size() != static_cast<Eigen::Index>(mesh_->num_vertices()))
    throw std::invalid_argument("assemble: field size mismatch");
  double* values = system_.matrix.valuePtr();
  std::copy(constant_values_.begin(), constant_values_.end(), values);
  Vector& rhs = system_.rhs;
  rhs.setZero();

  for (std::size_t t = 0; t < elements_.size(); ++t) {
    const Element& e = elements_[t];
    std::array<double, 3> up;
    for (int i = 0; i < 3; ++i) up[i] = std::max(u_prev[e.v[i]], 0.0);
    const double weight = diffusion_ * (up[0] + up[1] + up[2]) / 3.0;
    for (int i = 0; i < 3; ++i) {
      const int fi = node_to_free_[e.v[i]];
      if (fi < 0) continue;
      // (u+, phi_i)/dt
      rhs[fi] += e.area / 12.0 * (up[0] + up[1] + up[2] + up[i]) / dt_;
      for (int j = 0; j < 3; ++j) {
        const double a = weight * e.stiff[i][j];
        const int slot = slots_[t * 9 + i * 3 + j];
        if (slot >= 0) {
          values[slot] += a;
        } else {
          const double mass = e.area / 12.0 * (i == j ? 2.0 : 1.0);
          rhs[fi] -= (mass / dt_ + e.drift[i][j] + a) * dirichlet_values_[e.v[j]];
        }
      }
    }
  }
  return system_;
}

Vector Discretization::expand(const Vector& free_solution) const {
  Vector full(static_cast<Eigen::Index>(mesh_->num_vertices()));
  for (std::size_t k = 0; k < node_to_free_.size(); ++k) {
    const int f = node_to_free_[k];
    full[static_cast<Eigen::Index>(k)] = f >= 0 ? free_solution[f] : dirichlet_values_[k];
  }
  return full;
}

Vector Discretization::residual(const Vector& u_new, const Vector& u_prev) const {
  Vector r = Vector::Zero(static_cast<Eigen::Index>(mesh_->num_vertices()));
  for (const Element& e : elements_) {
    std::array<double, 3> up, un;
    for (int i = 0; i < 3; ++i) {
      up[i] = std::max(u_prev[e.v[i]], 0.0);
      un[i] = u_new[e.v[i]];
    }
    const double weight = diffusion_ * (up[0] + up[1] + up[2]) / 3.0;
    const double dsum = (un[0] - up[0]) + (un[1] - up[1]) + (un[2] - up[2]);
    for (int i = 0; i < 3; ++i) {
      double acc = e.area / 12.0 * (dsum + (un[i] - up[i])) / dt_;
      for (int j = 0; j < 3; ++j) acc += (weight * e.stiff[i][j] + e.drift[i][j]) * un[j];
      r[e.v[i]] += acc;
    }
  }
  return r;
}

Vector Discretization::mass_times(const Vector& u) const {
  Vector r = Vector::Zero(static_cast<Eigen::Index>(mesh_->num_vertices()));
  for (const Element& e : elements_) {
    const double sum = u[e.v[0]] + u[e.v[1]] + u[e.v[2]];
    for (int i = 0; i < 3; ++i) r[e.v[i]] += e.area / 12.0 * (sum + u[e.v[i]]);
  }
  return r;
}

LinearSystem assemble_step(const Mesh& mesh, const Field& u_prev, const Potential& v, const BoundarySpec& bc,
                           double dt) {
  Discretization disc(mesh, v, bc, dt);
  return disc.assemble(u_prev.values());
}

namespace {

// ILUT preconditioner that is only refactored on request, so that one
// factorization serves several nearby matrices of a time loop.
class FrozenIlut {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  FrozenIlut() {
    ilu_.setFillfactor(5);
    ilu_.setDroptol(1e-3);
  }
  void request_refresh() { stale_ = true; }
  bool ready() const { return !stale_; }

  FrozenIlut& analyzePattern(const SparseMatrix&) { return *this; }
  FrozenIlut& factorize(const SparseMatrix& a) {
    if (stale_) {
      ilu_.compute(a);
      stale_ = ilu_.info() != Eigen::Success;
    }
    return *this;
  }
  FrozenIlut& compute(const SparseMatrix& a) { return factorize(a); }
  template <typename Rhs>
  Vector solve(const Eigen::MatrixBase<Rhs>& b) const {
    return ilu_.solve(b);
  }
  Eigen::ComputationInfo info() const { return stale_ ? Eigen::NumericalIssue : Eigen::Success; }

 private:
  Eigen::IncompleteLUT<double> ilu_;
  bool stale_ = true;
};

constexpr int kRefreshIterations = 12;

}  // namespace

struct LinearSolver::Impl {
  LinearSolverKind kind;
  double tol;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool analysed = false;
  Eigen::Index analysed_nnz = -1;
  Eigen::BiCGSTAB<SparseMatrix, FrozenIlut> krylov;

  Vector krylov_solve(const SparseMatrix& a, const Vector& b, const Vector* guess) {
    krylov.compute(a);
    if (krylov.info() != Eigen::Success) throw SolverError("solve: preconditioner setup failed");
    Vector x = guess ? Vector(krylov.solveWithGuess(b, *guess)) : Vector(krylov.solve(b));
    return x;
  }
};

LinearSolver::LinearSolver(LinearSolverKind kind, double tol) : impl_(std::make_unique<Impl>()) {
  impl_->kind = kind;
  impl_->tol = tol;
}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Vector LinearSolver::solve(const SparseMatrix& a, const Vector& b, const Vector* guess) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw std::invalid_argument("solve: dimension mismatch");
  if (a.rows() == 0) return Vector();
  const double bnorm = b.norm();
  const double target = impl_->tol * (bnorm > 0.0 ? bnorm : 1.0);
  Vector x;
  if (impl_->kind == LinearSolverKind::SparseLU) {
    if (!impl_->analysed || impl_->analysed_nnz != a.nonZeros()) {
      impl_->lu.analyzePattern(a);
      impl_->analysed = true;
      impl_->analysed_nnz = a.nonZeros();
    }
    impl_->lu.factorize(a);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("solve: sparse LU factorization failed (singular matrix)");
    x = impl_->lu.solve(b);
    // A couple of refinement sweeps if the first solve is not accurate enough.
    for (int sweep = 0; sweep < 3 && (a * x - b).norm() > target; ++sweep) x += impl_->lu.solve(Vector(b - a * x));
  } else {
    auto& krylov = impl_->krylov;
    krylov.setTolerance(0.5 * impl_->tol);
    krylov.setMaxIterations(std::max<Eigen::Index>(1000, 4 * a.rows()));
    x = impl_->krylov_solve(a, b, guess);
    const bool converged = krylov.info() == Eigen::Success && (a * x - b).norm() <= target;
    if (!converged || krylov.iterations() > kRefreshIterations) {
      // Stale preconditioner: refactor for the current matrix.
      krylov.preconditioner().request_refresh();
      if (!converged) x = impl_->krylov_solve(a, b, guess);
    }
    if (krylov.info() != Eigen::Success) throw SolverError("solve: BiCGSTAB did not converge");
  }
  if (!x.allFinite() || (a * x - b).norm() > target) throw SolverError("solve: residual above tolerance");
  return x;
}

Vector solve_linear(const LinearSystem& sys, double tol, LinearSolverKind kind) {
  LinearSolver solver(kind, tol);
  return solver.solve(sys.matrix, sys.rhs);
}

namespace {

std::vector<std::pair<int, double>> snapshot_plan(const StepperConfig& cfg) {
  std::vector<std::pair<int, double>> plan;
  for (double ts : cfg.snapshot_times) {
    const double k = std::round(ts / cfg.dt);
    if (ts < 0.0 || ts > cfg.t_end + 1e-12 || std::abs(k * cfg.dt - ts) > 1e-12 + 1e-9 * cfg.dt)
      throw std::invalid_argument("evolve: snapshot time " + std::to_string(ts) + " is not a multiple of dt within [0, t_end]");
    plan.emplace_back(static_cast<int>(k), ts);
  }
  std::sort(plan.begin(), plan.end());
  return plan;
}

}  // namespace

Trajectory evolve(const Mesh& mesh, const Field& u_in, const Potential& v, const BoundarySpec& bc,
                  const StepperConfig& cfg, const StepObserver& observer) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end >= cfg.dt)) throw std::invalid_argument("evolve: need 0 < dt <= t_end");
  if (u_in.values().minCoeff() < 0.0) throw std::invalid_argument("evolve: initial datum must be non-negative");
  Discretization disc(mesh, v, bc, cfg.dt, cfg.diffusion_coefficient);
  LinearSolver solver(cfg.solver, cfg.solver_tol);
  const auto plan = snapshot_plan(cfg);
  const int steps = static_cast<int>(std::round(cfg.t_end / cfg.dt));

  Vector u = u_in.values();
  double mismatch = 0.0;
  for (int k : disc.dirichlet_nodes()) {
    mismatch = std::max(mismatch, std::abs(u[k] - disc.dirichlet_value(k)));
    u[k] = disc.dirichlet_value(k);
  }
  if (mismatch > 1e-12)
    std::cerr << "warning: initial datum disagrees with Dirichlet data by up to " << mismatch
              << "; overwriting boundary nodes\n";

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.min_value = u.minCoeff();
  std::size_t next = 0;
  auto take_snapshots = [&](int step, const Vector& values) {
    while (next < plan.size() && plan[next].first <= step) {
      traj.snapshots.push_back({plan[next].second, values});
      ++next;
    }
  };
  take_snapshots(0, u);

  Vector free_guess;
  for (int step = 1; step <= steps; ++step) {
    const LinearSystem& sys = disc.assemble(u);
    Vector x = solver.solve(sys.matrix, sys.rhs, free_guess.size() ? &free_guess : nullptr);
    Vector u_new = disc.expand(x);
    free_guess = std::move(x);

    const double rate = (u_new - u).lpNorm<Eigen::Infinity>() / cfg.dt;
    traj.change_rates.push_back(rate);
    traj.min_value = std::min(traj.min_value, u_new.minCoeff());
    traj.steps = step;
    if (observer) observer(StepView{step, step * cfg.dt, u_new, u, disc});
    u = std::move(u_new);
    take_snapshots(step, u);

    if (cfg.steady_tol > 0.0 && !traj.steady_step && rate < cfg.steady_tol) {
      traj.steady_step = step;
      if (cfg.stop_when_steady) break;
    }
  }
  // Remaining snapshots after an early stop see the steady state.
  while (next < plan.size()) traj.snapshots.push_back({plan[next++].second, u});
  traj.final_values = std::move(u);
  return traj;
}

VectorField recover_flux(const Mesh& mesh, const Field& u_new, const Field& u_prev, const Potential& v) {
  const Eigen::Index nv = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Eigen::Triplet<double>> triplets;
  Vector b1 = Vector::Zero(nv);
  Vector b2 = Vector::Zero(nv);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(static_cast<int>(t));
    std::array<Point, 3> p{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
    std::array<std::array<double, 2>, 3> grad;
    for (int i = 0; i < 3; ++i) {
      const Point& pj = p[(i + 1) % 3];
      const Point& pk = p[(i + 2) % 3];
      grad[i] = {(pj.x2 - pk.x2) / (2.0 * area), (pk.x1 - pj.x1) / (2.0 * area)};
    }
    double gu1 = 0.0, gu2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      gu1 += u_new[tri[i]] * grad[i][0];
      gu2 += u_new[tri[i]] * grad[i][1];
    }
    for (int q = 0; q < 3; ++q) {
      const int ia = (q + 1) % 3, ib = (q + 2) % 3;
      const double mx = 0.5 * (p[ia].x1 + p[ib].x1);
      const double my = 0.5 * (p[ia].x2 + p[ib].x2);
      const double um = 0.5 * (u_new[tri[ia]] + u_new[tri[ib]]);
      const double upm = 0.5 * (std::max(u_prev[tri[ia]], 0.0) + std::max(u_prev[tri[ib]], 0.0));
      const double j1 = -upm * gu1 - um * v.d1(mx, my);
      const double j2 = -upm * gu2 - um * (v.dimension() == 2 ? v.d2(mx, my) : 0.0);
      for (int i : {ia, ib}) {
        b1[tri[i]] += area / 3.0 * 0.5 * j1;
        b2[tri[i]] += area / 3.0 * 0.5 * j2;
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0));
  }
  SparseMatrix mass(nv, nv);
  mass.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<SparseMatrix> chol(mass);
  if (chol.info() != Eigen::Success) throw SolverError("recover_flux: mass matrix factorization failed");
  return VectorField{&mesh, chol.solve(b1), chol.solve(b2)};
}

std::optional<SteadyPoint> detect_steady(const Trajectory& traj, double steady_tol) {
  for (std::size_t n = 0; n < traj.change_rates.size(); ++n)
    if (traj.change_rates[n] < steady_tol) return SteadyPoint{static_cast<int>(n) + 1, (n + 1) * traj.dt};
  return std::nullopt;
}

std::optional<std::pair<int, Field>> detect_steady(std::span<const Field> states, double dt, double steady_tol) {
  for (std::size_t n = 1; n < states.size(); ++n) {
    const double rate = (states[n].values() - states[n - 1].values()).lpNorm<Eigen::Infinity>() / dt;
    if (rate < steady_tol) return std::make_pair(static_cast<int>(n), states[n]);
  }
  return std::nullopt;
}

}  // namespace degdiff::fem
