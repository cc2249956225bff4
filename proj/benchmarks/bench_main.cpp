#include <cmath>

#include <benchmark/benchmark.h>

#include "degdiff/fem2d.hpp"
#include "degdiff/specfun.hpp"
#include "degdiff/stationary1d.hpp"

using namespace degdiff;

static void BM_LambertW0(benchmark::State& state) {
  double y = -0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::lambert_w0(y));
    y = y > 40.0 ? -0.3 : y + 0.01;
  }
}
BENCHMARK(BM_LambertW0);

static void BM_LambertWUpper(benchmark::State& state) {
  double y = 2.8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::lambert_w_upper(y));
    y = y > 40.0 ? 2.8 : y + 0.01;
  }
}
BENCHMARK(BM_LambertWUpper);

static void BM_Phi(benchmark::State& state) {
  double alpha = -5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary::phi(0.3, 1.2, 2.0, alpha));
    alpha = alpha > 5.0 ? -5.0 : alpha + 0.013;
  }
}
BENCHMARK(BM_Phi);

static void BM_ShootingBarrier(benchmark::State& state) {
  const Potential v = Potential::parse("exp(-(x1-0.5)^2)");
  for (auto _ : state) benchmark::DoNotOptimize(stationary::solve_bvp({2.0, 1.0}, v).c);
}
BENCHMARK(BM_ShootingBarrier)->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State& state) {
  const Mesh mesh = build_structured(static_cast<int>(state.range(0)));
  const Potential v = Potential::parse("-x1+exp(-x1^2)", 2);
  fem::Discretization disc(mesh, v, fem::BoundarySpec::left_right(2.0, 1.0), 1e-3);
  const fem::Field u = fem::Field::interpolate(mesh, [](double x1, double) { return 2.0 - x1; });
  for (auto _ : state) benchmark::DoNotOptimize(disc.assemble(u.values()).rhs.data());
}
BENCHMARK(BM_Assemble)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

// Twenty implicit steps from a linear profile; the preconditioner or
// factorization is reused across steps as in a full run.
static void BM_Steps(benchmark::State& state) {
  const Mesh mesh = build_structured(static_cast<int>(state.range(0)));
  const Potential v = Potential::parse("-x1+exp(-x1^2)", 2);
  const fem::Field u = fem::Field::interpolate(mesh, [](double x1, double) { return 2.0 - x1; });
  fem::StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.02;
  cfg.solver = state.range(1) == 0 ? fem::LinearSolverKind::SparseLU : fem::LinearSolverKind::BiCGSTAB;
  for (auto _ : state)
    benchmark::DoNotOptimize(fem::evolve(mesh, u, v, fem::BoundarySpec::left_right(2.0, 1.0), cfg).final_values.data());
  state.SetLabel(state.range(1) == 0 ? "sparse-lu" : "bicgstab");
}
BENCHMARK(BM_Steps)->Args({50, 0})->Args({50, 1})->Args({100, 0})->Args({100, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
