#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "degdiff/errors.hpp"
#include "degdiff/stationary1d.hpp"

using namespace degdiff;
using namespace degdiff::stationary;

namespace {

// Classical RK4 on u' = c/u - alpha(x).
template <typename Slope>
double rk4(double u0, double c, Slope alpha, double x_end, double h) {
  const int n = static_cast<int>(std::lround(x_end / h));
  h = x_end / n;
  double u = u0;
  auto f = [&](double x, double v) { return c / v - alpha(x); };
  for (int i = 0; i < n; ++i) {
    const double x = i * h;
    const double k1 = f(x, u);
    const double k2 = f(x + h / 2, u + h / 2 * k1);
    const double k3 = f(x + h / 2, u + h / 2 * k2);
    const double k4 = f(x + h, u + h * k3);
    u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

// Root of -1 + k ln((k-1)/(k-2)) = 1 on (2, inf), by bisection.
double linear_current() {
  double lo = 2.0 + 1e-12, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double k = 0.5 * (lo + hi);
    const double g = -1.0 + k * std::log((k - 1) / (k - 2)) - 1.0;
    (g > 0 ? lo : hi) = k;
  }
  return 0.5 * (lo + hi);
}

double sup_distance(const StationaryProfile& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < b.size(); ++i) d = std::max(d, std::abs(a.u[i] - b[i]));
  return d;
}

}  // namespace

TEST(Phi, Examples) {
  EXPECT_NEAR(phi(1.0, 1.0, 1.5, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(phi(0.7, 2.0, 4.0, 2.0), 2.0, 1e-14);
  EXPECT_NEAR(phi(0.5, 1.0, 1.0, 2.0), rk4(1.0, 1.0, [](double) { return 2.0; }, 0.5, 1e-5), 1e-9);
  EXPECT_NEAR(phi(0.0, 1.3, 2.0, -1.0), 1.3, 1e-15);
}

TEST(Phi, MatchesRk4AcrossBranches) {
  for (double alpha : {-5.0, -1.0, -1e-3, -1e-9, 0.0, 1e-9, 1e-3, 1.0, 5.0, 40.0}) {
    for (double u0 : {0.05, 1.0, 3.0}) {
      for (double c : {0.01, 1.0, 10.0}) {
        // Skip combinations where the RK4 step would be stiff-unstable.
        if (2e-5 * alpha * alpha / c > 0.5) continue;
        const double ref = rk4(u0, c, [alpha](double) { return alpha; }, 0.8, 2e-5);
        EXPECT_NEAR(phi(0.8, u0, c, alpha), ref, 1e-8 * std::max(1.0, ref)) << alpha << ' ' << u0 << ' ' << c;
      }
    }
  }
}

TEST(Phi, Monotonicity) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ud(0.05, 3.0), cd(0.01, 5.0), ad(-6.0, 6.0), xd(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double dx = xd(rng), u0 = ud(rng), c = cd(rng), a = ad(rng);
    const double base = phi(dx, u0, c, a);
    // Deep in the relaxation to c/a the u0 dependence drops below rounding.
    const bool saturated = a > 0 && std::abs(base - c / a) < 1e-12 * base;
    if (saturated)
      EXPECT_GE(phi(dx, u0 * 1.01, c, a), base);
    else
      EXPECT_GT(phi(dx, u0 * 1.01, c, a), base);
    EXPECT_GT(phi(dx, u0, c * 1.01, a), base);
    EXPECT_LT(phi(dx, u0, c, a + 0.01 * (1 + std::abs(a))), base);
  }
}

TEST(Phi, ApproachesEquilibriumForPositiveSlope) {
  const double c = 2.0, alpha = 0.5, target = c / alpha;
  for (double u0 : {0.1, 9.0}) {
    const double e10 = std::abs(phi(10.0, u0, c, alpha) - target);
    const double e20 = std::abs(phi(20.0, u0, c, alpha) - target);
    const double e80 = std::abs(phi(80.0, u0, c, alpha) - target);
    EXPECT_LT(e20, e10);
    EXPECT_LT(e80, 1e-3);
  }
}

TEST(PropagatePiecewise, SingleAndSplitIntervals) {
  const std::vector<double> one = {0.0, 1.0};
  const std::vector<double> zero = {0.0};
  StationaryProfile p = propagate_piecewise(one, zero, 1.0, 1.5);
  EXPECT_NEAR(p.u.back(), phi(1.0, 1.0, 1.5, 0.0), 1e-15);

  const std::vector<double> two = {0.0, 0.37, 1.0};
  const std::vector<double> same = {1.7, 1.7};
  p = propagate_piecewise(two, same, 0.8, 1.1);
  EXPECT_NEAR(p.u.back(), phi(1.0, 0.8, 1.1, 1.7), 1e-12);
  EXPECT_THROW(propagate_piecewise(two, zero, 1.0, 1.0), std::invalid_argument);
}

TEST(PropagatePiecewise, ConvergesToCauchySolution) {
  const Potential v = Potential::parse("sin(2*pi*x1)");
  const std::vector<double> grid = {0.0, 1.0};
  const double reference = integrate_cauchy(1.2, 1.0, v, grid).u.back();
  double previous = 1e9;
  for (int k = 4; k <= 10; k += 2) {
    const int n = 1 << k;
    std::vector<double> part(n + 1), slopes(n);
    for (int i = 0; i <= n; ++i) part[i] = static_cast<double>(i) / n;
    for (int i = 0; i < n; ++i) slopes[i] = (v(part[i + 1]) - v(part[i])) * n;
    const double err = std::abs(propagate_piecewise(part, slopes, 1.2, 1.0).u.back() - reference);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(IntegrateCauchy, Examples) {
  const std::vector<double> grid = uniform_grid(101);
  const StationaryProfile lin = integrate_cauchy(2.0, 1.0, Potential::parse("-x1"), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(lin.u[i], phi(grid[i], 2.0, 1.0, -1.0), 1e-9);
  const StationaryProfile flat = integrate_cauchy(1.0, 1.0, Potential::parse("0*x1"), grid);
  EXPECT_NEAR(flat.u.back(), std::sqrt(3.0), 1e-9);
}

TEST(IntegrateCauchy, SmallCurrentApproachesLimitProfile) {
  const Potential v = Potential::parse("sin(2*pi*x1)");
  const std::vector<double> grid = uniform_grid(1001);
  const StationaryProfile p = integrate_cauchy(1.2, 1e-6, v, grid);
  const LimitProfile lim = limit_profile(1.2, v);
  const auto bps = lim.breakpoints();
  double d = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    bool near = false;
    for (double b : bps) near = near || std::abs(grid[i] - b) < 1e-2;
    if (!near) d = std::max(d, std::abs(p.u[i] - lim(grid[i])));
  }
  EXPECT_LT(d, 5e-3);
}

TEST(IntegrateCauchy, SmallCurrentLimitWithVacuum) {
  const Potential v = Potential::parse("sin(2*pi*x1)");
  const std::vector<double> grid = uniform_grid(1001);
  const StationaryProfile p = integrate_cauchy(0.6, 1e-6, v, grid);
  const LimitProfile lim = limit_profile(0.6, v);
  double d = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    bool near = false;
    for (double b : lim.breakpoints()) near = near || std::abs(grid[i] - b) < 1e-2;
    if (!near) d = std::max(d, std::abs(p.u[i] - lim(grid[i])));
  }
  EXPECT_LT(d, 1e-2);
}

TEST(Envelope, ConstantSlopeCollapses) {
  const std::vector<double> grid = uniform_grid(21);
  const Envelope env = envelope(1.0, 2.0, Potential::parse("-2*x1"), grid);
  EXPECT_EQ(env.alpha_max, -2.0);
  EXPECT_EQ(env.alpha_min, -2.0);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(env.lower.u[i], env.upper.u[i]);
}

TEST(Envelope, SineSlopes) {
  const std::vector<double> grid = uniform_grid(21);
  const Envelope env = envelope(1.0, 1.0, Potential::parse("sin(2*pi*x1)"), grid);
  EXPECT_NEAR(env.alpha_max, 2 * M_PI, 1e-9);
  EXPECT_NEAR(env.alpha_min, -2 * M_PI, 1e-9);
}

TEST(Envelope, BoundsRandomPotentials) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), ud(0.2, 3.0), cd(0.05, 4.0);
  const std::vector<double> grid = uniform_grid(101);
  for (int trial = 0; trial < 100; ++trial) {
    char text[256];
    std::snprintf(text, sizeof text, "%.6f*x1 + %.6f*sin(%.6f*x1) + %.6f*exp(-(x1-%.6f)^2)", coef(rng), coef(rng),
                  3.0 * coef(rng), coef(rng), 0.25 * coef(rng) + 0.5);
    const Potential v = Potential::parse(text);
    const double u0 = ud(rng), c = cd(rng);
    const Envelope env = envelope(u0, c, v, grid);
    const StationaryProfile p = integrate_cauchy(u0, c, v, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_LE(env.lower.u[i], p.u[i] + 1e-9) << text;
      EXPECT_LE(p.u[i], env.upper.u[i] + 1e-9) << text;
    }
  }
}

TEST(CriticalValues, Examples) {
  CriticalValues cv = critical_values(Potential::parse("sin(2*pi*x1)"));
  EXPECT_NEAR(cv.u0_crit, 1.0, 1e-9);
  EXPECT_NEAR(cv.u1_crit, 1.0, 1e-9);
  cv = critical_values(Potential::parse("-x1"));
  EXPECT_EQ(cv.u0_crit, 0.0);
  EXPECT_EQ(cv.u1_crit, 1.0);
  cv = critical_values(Potential::parse("exp(-(x1-.5)^2)"));
  EXPECT_NEAR(cv.u0_crit, 1.0 - std::exp(-0.25), 1e-12);
  EXPECT_NEAR(cv.u1_crit, 1.0 - std::exp(-0.25), 1e-12);
  EXPECT_EQ(cv.v_left, std::exp(-0.25));
}

TEST(LimitProfile, Examples) {
  const Potential sine = Potential::parse("sin(2*pi*x1)");
  LimitProfile lim = limit_profile(1.2, sine);
  ASSERT_FALSE(lim.vacua().empty());
  EXPECT_EQ(lim.vacua().front().x, 1.0);
  for (double x : {0.0, 0.25, 0.6, 1.0}) EXPECT_NEAR(lim(x), 1.2 - std::sin(2 * M_PI * x), 1e-12);

  lim = limit_profile(2.0, Potential::parse("-x1"));
  EXPECT_EQ(lim.vacua().front().x, 1.0);
  EXPECT_NEAR(lim(0.4), 2.4, 1e-15);

  lim = limit_profile(0.6, sine);
  ASSERT_GE(lim.vacua().size(), 1u);
  EXPECT_NEAR(lim.vacua()[0].x, std::asin(0.6) / (2 * M_PI), 1e-10);
  EXPECT_NEAR(lim.vacua()[0].y, 0.25, 1e-10);
  EXPECT_NEAR(lim(0.6), 1.0 - std::sin(2 * M_PI * 0.6), 1e-9);
  EXPECT_NEAR(lim(1.0), 1.0, 1e-9);
  EXPECT_EQ(lim(0.2), 0.0);
}

TEST(LimitProfile, ContinuousAndNonNegative) {
  const LimitProfile lim = limit_profile(0.3, Potential::parse("sin(6*pi*x1)*exp(-x1)"));
  double prev = lim(0.0);
  for (int i = 1; i <= 20000; ++i) {
    const double u = lim(i / 20000.0);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(std::abs(u - prev), 2e-3);
    prev = u;
  }
}

TEST(ShootingMap, MonotoneInC) {
  const Potential v = Potential::parse("sin(2*pi*x1)");
  const std::vector<double> grid = {0.0, 1.0};
  double prev = 0.0;
  for (int k = -6; k <= 3; ++k) {
    for (double m : {1.0, 3.0}) {
      const double c = m * std::pow(10.0, k);
      const double end = integrate_cauchy(1.2, c, v, grid).u.back();
      EXPECT_GT(end, prev) << c;
      prev = end;
    }
  }
}

TEST(SolveBvp, Examples) {
  const Potential sine = Potential::parse("sin(2*pi*x1)");
  StationaryProfile p = solve_bvp({1.2, 1.2}, sine);
  EXPECT_EQ(p.c, 0.0);
  for (std::size_t i = 0; i < p.x.size(); i += 50) EXPECT_NEAR(p.u[i], 1.2 - std::sin(2 * M_PI * p.x[i]), 1e-9);

  p = solve_bvp({2.0, 1.0}, Potential::parse("-x1"));
  const double k = linear_current();
  EXPECT_NEAR(k, 3.1065656, 1e-6);
  EXPECT_NEAR(-p.c, k, 1e-6);
  EXPECT_NEAR(stationary_current(p), k, 1e-6);
  EXPECT_NEAR(p.u.front(), 2.0, 1e-8);
  EXPECT_NEAR(p.u.back(), 1.0, 1e-8);

  p = solve_bvp({1.0, 1.0}, Potential::parse("0*x1"));
  EXPECT_EQ(p.c, 0.0);
  for (double u : p.u) EXPECT_NEAR(u, 1.0, 1e-12);
}

TEST(SolveBvp, FrozenCurrents) {
  // Values from an independent RK4 + bisection shooting script.
  struct Case {
    const char* v;
    double u0, u1, current;
  };
  const Case cases[] = {
      {"-x1+exp(-x1^2)", 2, 1, 4.00850},
      {"exp(-(x1-.5)^2)", 2, 1, 1.35669},
      {"exp(-(x1-.5)^2)", 6, 1, 16.8528},
  };
  for (const Case& c : cases) {
    const StationaryProfile p = solve_bvp({c.u0, c.u1}, Potential::parse(c.v));
    EXPECT_NEAR(stationary_current(p), c.current, 2e-4 * c.current) << c.v << ' ' << c.u0;
  }
}

TEST(SolveBvp, SubcriticalCases) {
  const Potential sine = Potential::parse("sin(2*pi*x1)");
  // Right datum subcritical: negative c through the reversed problem.
  StationaryProfile p = solve_bvp({1.2, 0.2}, sine);
  EXPECT_LT(p.c, 0.0);
  EXPECT_NEAR(p.u.front(), 1.2, 1e-8);
  EXPECT_NEAR(p.u.back(), 0.2, 1e-8);
  // Left datum subcritical.
  p = solve_bvp({0.6, 1.2}, sine);
  EXPECT_GT(p.c, 0.0);
  EXPECT_NEAR(p.u.front(), 0.6, 1e-8);
  EXPECT_NEAR(p.u.back(), 1.2, 1e-8);
  for (double u : p.u) EXPECT_GT(u, 0.0);
  EXPECT_THROW(solve_bvp({0.5, 0.5}, sine), NotCoveredError);
}

TEST(SolveBvp, BracketCeiling) {
  ShootingOptions opt;
  opt.c_max = 1.0;
  EXPECT_THROW(solve_bvp({1.0, 50.0}, Potential::parse("0*x1"), opt), BracketError);
}

TEST(SolveBvp, ReversalSymmetry) {
  const Potential v = Potential::parse("-x1+exp(-x1^2)");
  const StationaryProfile a = solve_bvp({2.0, 1.0}, v);
  const StationaryProfile b = solve_bvp({1.0, 2.0}, v.reflected());
  EXPECT_NEAR(a.c, -b.c, 1e-7 * std::abs(a.c));
  const std::size_t n = a.u.size();
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a.u[i], b.u[n - 1 - i], 1e-7);
}

TEST(SolveBvp, ProductFormResidual) {
  ShootingOptions opt;
  opt.grid_points = 2001;
  struct Case {
    const char* v;
    double u0, u1;
  };
  const Case cases[] = {{"-x1", 2, 1},           {"-x1+exp(-x1^2)", 2, 1}, {"exp(-(x1-.5)^2)", 2, 1},
                        {"exp(-(x1-.5)^2)", 6, 1}, {"sin(2*pi*x1)", 1.2, 2.2}, {"sin(2*pi*x1)", 1.2, 0.2},
                        {"sin(2*pi*x1)", 0.6, 1.2}};
  for (const Case& c : cases) {
    const Potential v = Potential::parse(c.v);
    const StationaryProfile p = solve_bvp({c.u0, c.u1}, v, opt);
    EXPECT_LE(product_form_residual(p, v), 1e-6) << c.v << ' ' << c.u0 << ' ' << c.u1;
  }
}

TEST(NonUniqueness, ZeroAndShiftedPotentialAreStationary) {
  const Potential v = Potential::parse("sin(2*pi*x1)");
  const std::vector<double> grid = uniform_grid(1001);
  StationaryProfile zero{grid, std::vector<double>(grid.size(), 0.0), 0.0};
  EXPECT_EQ(product_form_residual(zero, v), 0.0);
  const double gamma = 1.5;
  StationaryProfile shifted{grid, {}, 0.0};
  for (double x : grid) shifted.u.push_back(gamma - v(x));
  EXPECT_LT(product_form_residual(shifted, v), 1e-9);
}

TEST(StationaryCurrent, Sign) {
  EXPECT_EQ(stationary_current(StationaryProfile{{}, {}, -3.11}), 3.11);
  EXPECT_EQ(stationary_current(StationaryProfile{{}, {}, 0.0}), 0.0);
}

TEST(ProfileCsv, Format) {
  std::ostringstream os;
  write_profile_csv(os, StationaryProfile{{0.0, 1.0}, {2.0, 1.5}, -0.25});
  EXPECT_EQ(os.str(), "# c=-0.25\nx,u\n0,2\n1,1.5\n");
}

TEST(UniformGrid, Endpoints) {
  const auto g = uniform_grid(7);
  ASSERT_EQ(g.size(), 7u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[3], 0.5, 1e-15);
}
