#include "degdiff/stationary1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "degdiff/csv.hpp"
#include "degdiff/errors.hpp"
#include "degdiff/specfun.hpp"

namespace degdiff::stationary {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kCollapseFloor = 1e-12;
constexpr int kLimitSamples = 10000;

// phi for |alpha| * sqrt(u0^2 + 2 c dx) / c small, where the Lambert forms
// lose accuracy next to the branch point. Solves
//   G(q) = G(u0) + c dx,   G(q) = sum_{k>=2} r^(k-2) q^k / k,   r = alpha / c,
// which is the implicit form of the closed-form solution.
double phi_small_drift(double dx, double u0, double c, double r) {
  auto g = [r](double q) {
    double term = q * q;
    double sum = 0.5 * term;
    const double rq = r * q;
    for (int k = 3; k < 60; ++k) {
      term *= rq;
      const double contrib = term / k;
      sum += contrib;
      if (std::abs(contrib) <= 1e-18 * sum) break;
    }
    return sum;
  };
  const double target = g(u0) + c * dx;
  double q = std::sqrt(u0 * u0 + 2.0 * c * dx);
  for (int it = 0; it < 50; ++it) {
    const double step = (g(q) - target) * (1.0 - r * q) / q;
    q -= step;
    if (std::abs(step) <= 1e-16 * q) break;
  }
  return q;
}

bool is_ascending(std::span<const double> xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) return false;
  return true;
}

StationaryProfile mirrored(const StationaryProfile& p) {
  StationaryProfile out;
  out.x.resize(p.x.size());
  out.u.resize(p.u.size());
  const std::size_t n = p.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.x[i] = 1.0 - p.x[n - 1 - i];
    out.u[i] = p.u[n - 1 - i];
  }
  if (n > 0) {
    out.x.front() = 0.0;
    out.x.back() = 1.0;
  }
  out.c = -p.c;
  return out;
}

// First point in (start, 1] where level - V(xi) stops being positive.
std::optional<double> first_level_crossing(const Potential& v, double level, double start) {
  const double h = 1.0 / kLimitSamples;
  double prev = start;
  for (int j = static_cast<int>(std::floor(start / h)) + 1; j <= kLimitSamples; ++j) {
    const double s = (j == kLimitSamples) ? 1.0 : j * h;
    if (s <= start) continue;
    if (level - v(s) <= 0.0) {
      double lo = prev;
      double hi = s;
      for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (level - v(mid) > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = s;
  }
  return std::nullopt;
}

// First point in [start, 1] where V' turns negative.
std::optional<double> first_descent(const Potential& v, double start) {
  if (v.d1(start) < 0.0) return start;
  const double h = 1.0 / kLimitSamples;
  double prev = start;
  for (int j = static_cast<int>(std::floor(start / h)) + 1; j <= kLimitSamples; ++j) {
    const double s = (j == kLimitSamples) ? 1.0 : j * h;
    if (s <= start) continue;
    if (v.d1(s) < 0.0) {
      double lo = prev;
      double hi = s;
      for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (v.d1(mid) >= 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = s;
  }
  return std::nullopt;
}

double shoot_endpoint(double u0, double c, const Potential& v, const CauchyOptions& options) {
  const double ends[] = {0.0, 1.0};
  return integrate_cauchy(u0, c, v, ends, options).u.back();
}

// Smallest c > 0 (to tolerance) with u(1; c) = target, given that the
// c -> 0+ limit of u(1) lies below target.
double shoot_positive(double u0, double target, const Potential& v, const ShootingOptions& options) {
  auto miss = [&](double c) { return shoot_endpoint(u0, c, v, options.cauchy) - target; };
  double lo = 0.0;
  double hi = 1.0;
  double f_hi = miss(hi);
  while (f_hi < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > options.c_max) throw BracketError("solve_bvp: shooting bracket exceeds c_max");
    f_hi = miss(hi);
  }
  if (std::abs(f_hi) <= 0.25 * options.tol) return hi;
  double mid = hi;
  for (int it = 0; it < options.max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = miss(mid);
    if (std::abs(f) <= 0.25 * options.tol) return mid;
    if (f < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return mid;
}

// Left datum supercritical for v.
StationaryProfile solve_from_left(double u0, double u1, const Potential& v, const ShootingOptions& options) {
  const std::vector<double> grid = uniform_grid(options.grid_points);
  const double threshold = limit_profile(u0, v)(1.0);

  if (std::abs(u1 - threshold) <= 0.5 * options.tol) return limit_profile(u0, v).sample(grid);

  if (u1 > threshold) {
    const double c = shoot_positive(u0, u1, v, options);
    return integrate_cauchy(u0, c, v, grid, options.cauchy);
  }
  // c < 0: the backward problem from u1 with the reflected potential.
  const Potential reflected = v.reflected();
  const double magnitude = shoot_positive(u1, u0, reflected, options);
  return mirrored(integrate_cauchy(u1, magnitude, reflected, grid, options.cauchy));
}

}  // namespace

std::vector<double> uniform_grid(int points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / (points - 1);
  grid.back() = 1.0;
  return grid;
}

double phi(double dx, double u0, double c, double alpha) {
  if (!(u0 > 0.0) || !(c > 0.0) || !(dx >= 0.0)) throw std::invalid_argument("phi: requires dx >= 0, u0 > 0, c > 0");
  if (dx == 0.0) return u0;
  const double base = std::sqrt(u0 * u0 + 2.0 * c * dx);
  if (alpha == 0.0) return base;
  const double r = alpha / c;
  if (std::abs(r) * base < 0.05) return phi_small_drift(dx, u0, c, r);

  const double s = r * u0;         // alpha u0 / c
  const double tau = alpha * r * dx;  // alpha^2 dx / c
  if (alpha > 0.0) {
    double w;
    if (s < 1.0) {
      w = specfun::lambert_w0((s - 1.0) * std::exp(s - 1.0 - tau));
    } else if (s == 1.0) {
      return c / alpha;
    } else {
      w = specfun::lambert_w0_exp(std::log(s - 1.0) + (s - 1.0) - tau);
    }
    return (c / alpha) * (1.0 + w);
  }
  const double excess = tau + specfun::x_minus_log1p(-s);
  const double w = specfun::lambert_w_upper_excess(excess);
  return (c / alpha) * (1.0 - w);
}

StationaryProfile propagate_piecewise(std::span<const double> partition, std::span<const double> alphas, double u0,
                                      double c) {
  if (partition.size() < 2 || alphas.size() + 1 != partition.size())
    throw std::invalid_argument("propagate_piecewise: need n+1 partition points for n slopes");
  if (!is_ascending(partition)) throw std::invalid_argument("propagate_piecewise: partition must be ascending");
  StationaryProfile out;
  out.c = c;
  out.x.assign(partition.begin(), partition.end());
  out.u.resize(partition.size());
  out.u[0] = u0;
  for (std::size_t i = 0; i < alphas.size(); ++i)
    out.u[i + 1] = phi(partition[i + 1] - partition[i], out.u[i], c, alphas[i]);
  return out;
}

StationaryProfile integrate_cauchy(double u0, double c, const Potential& v, std::span<const double> grid,
                                   const CauchyOptions& options) {
  if (!(u0 > 0.0)) throw std::invalid_argument("integrate_cauchy: u0 must be positive");
  if (grid.empty() || !is_ascending(grid)) throw std::invalid_argument("integrate_cauchy: grid must be ascending");
  if (v.dimension() != 1) throw std::invalid_argument("integrate_cauchy: potential must be one-dimensional");

  StationaryProfile out;
  out.c = c;
  out.x.assign(grid.begin(), grid.end());
  out.u.reserve(grid.size());
  if (grid.size() == 1) {
    out.u.push_back(u0);
    return out;
  }

  // For c > 0 the solution stays above min(u0, c / max V'_+); trial stages
  // are kept above half that bound.
  double stage_floor = kCollapseFloor;
  if (c > 0.0) {
    const double slope_max = maximize(v.gradient(Variable::X1), 0.0, 1.0, 2000).value;
    stage_floor = 0.5 * (slope_max > 0.0 ? std::min(u0, c / slope_max) : u0);
  }

  auto rhs = [&](const double& u, double& dudx, double x) {
    dudx = c / std::max(u, stage_floor) - v.d1(x);
  };
  auto observe = [&](const double& u, double) {
    if (c < 0.0 && u < kCollapseFloor) throw CollapseError("integrate_cauchy: solution collapsed below 1e-12");
    out.u.push_back(u);
  };

  using Stepper = odeint::runge_kutta_dopri5<double, double, double, double, odeint::vector_space_algebra>;
  double state = u0;
  const double first_step = std::min(1e-3, grid[1] - grid[0]);
  try {
    odeint::integrate_times(odeint::make_controlled(options.abs_tol, options.rel_tol, Stepper()), rhs, state,
                            grid.begin(), grid.end(), first_step, observe,
                            odeint::max_step_checker(options.max_steps));
  } catch (const odeint::no_progress_error&) {
  } catch (const odeint::step_adjustment_error&) {
  }
  if (out.u.size() == grid.size()) return out;
  if (c < 0.0) throw CollapseError("integrate_cauchy: step size collapsed for c < 0");

  // Fallback: exact propagation over a fine partition with secant slopes.
  std::vector<double> partition;
  const double span_x = grid.back() - grid.front();
  for (int i = 0; i <= options.fallback_intervals; ++i)
    partition.push_back(grid.front() + span_x * i / options.fallback_intervals);
  partition.insert(partition.end(), grid.begin(), grid.end());
  std::sort(partition.begin(), partition.end());
  partition.erase(std::unique(partition.begin(), partition.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                  partition.end());
  std::vector<double> alphas(partition.size() - 1);
  for (std::size_t i = 0; i + 1 < partition.size(); ++i)
    alphas[i] = (v(partition[i + 1]) - v(partition[i])) / (partition[i + 1] - partition[i]);
  const StationaryProfile fine = propagate_piecewise(partition, alphas, u0, c);
  out.u.clear();
  std::size_t k = 0;
  for (double x : grid) {
    while (k + 1 < fine.x.size() && fine.x[k] < x - 1e-15) ++k;
    out.u.push_back(fine.u[k]);
  }
  return out;
}

Envelope envelope(double u0, double c, const Potential& v, std::span<const double> grid) {
  const Expr& slope = v.gradient(Variable::X1);
  Envelope env;
  env.alpha_max = maximize(slope, 0.0, 1.0).value;
  env.alpha_min = minimize(slope, 0.0, 1.0).value;
  for (StationaryProfile* p : {&env.lower, &env.upper}) {
    p->c = c;
    p->x.assign(grid.begin(), grid.end());
    p->u.reserve(grid.size());
  }
  for (double x : grid) {
    env.lower.u.push_back(phi(x - grid.front(), u0, c, env.alpha_max));
    env.upper.u.push_back(phi(x - grid.front(), u0, c, env.alpha_min));
  }
  return env;
}

CriticalValues critical_values(const Potential& v) {
  const Extremum m = max_value(v, 0.0, 1.0);
  const double v0 = v(0.0);
  const double v1 = v(1.0);
  return {std::max(m.value - v0, 0.0), std::max(m.value - v1, 0.0), m.value, v0, v1, m.location};
}

LimitProfile::LimitProfile(double u0, Potential v, std::vector<Vacuum> vacua)
    : u0_(u0), v_(std::move(v)), vacua_(std::move(vacua)) {}

double LimitProfile::operator()(double x) const {
  double level = u0_ + v_(0.0);
  for (const Vacuum& vac : vacua_) {
    if (x <= vac.x) return std::max(level - v_(x), 0.0);
    if (x <= vac.y) return 0.0;
    level = v_(vac.y);
  }
  return std::max(level - v_(x), 0.0);
}

std::vector<double> LimitProfile::breakpoints() const {
  std::vector<double> out;
  for (const Vacuum& vac : vacua_) {
    out.push_back(vac.x);
    out.push_back(vac.y);
  }
  return out;
}

StationaryProfile LimitProfile::sample(std::span<const double> grid) const {
  StationaryProfile out;
  out.c = 0.0;
  out.x.assign(grid.begin(), grid.end());
  for (double x : grid) out.u.push_back((*this)(x));
  return out;
}

LimitProfile limit_profile(double u0, const Potential& v) {
  if (!(u0 > 0.0)) throw std::invalid_argument("limit_profile: u0 must be positive");
  std::vector<LimitProfile::Vacuum> vacua;
  double level = u0 + v(0.0);
  double start = 0.0;
  for (;;) {
    const std::optional<double> x = first_level_crossing(v, level, start);
    if (!x) {
      vacua.push_back({1.0, 1.0});
      break;
    }
    const std::optional<double> y = first_descent(v, *x);
    if (!y) {
      vacua.push_back({*x, 1.0});
      break;
    }
    vacua.push_back({*x, *y});
    level = v(*y);
    start = *y;
  }
  return LimitProfile(u0, v, std::move(vacua));
}

StationaryProfile solve_bvp(DirichletPair data, const Potential& v, const ShootingOptions& options) {
  if (!(data.left > 0.0) || !(data.right > 0.0)) throw std::invalid_argument("solve_bvp: Dirichlet data must be positive");
  const CriticalValues crit = critical_values(v);
  if (data.left > crit.u0_crit) return solve_from_left(data.left, data.right, v, options);
  if (data.right > crit.u1_crit) return mirrored(solve_from_left(data.right, data.left, v.reflected(), options));
  throw NotCoveredError("solve_bvp: both Dirichlet data are subcritical; existence is not covered");
}

double stationary_current(const StationaryProfile& p) { return -p.c; }

double product_form_residual(const StationaryProfile& p, const Potential& v) {
  const std::size_t n = p.x.size();
  if (n < 5 || p.u.size() != n) throw std::invalid_argument("product_form_residual: need at least 5 samples");
  const double h = (p.x.back() - p.x.front()) / static_cast<double>(n - 1);
  const auto& u = p.u;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double du;
    if (i == 1) {
      du = (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]) / (12.0 * h);
    } else if (i == n - 2) {
      du = (3.0 * u[n - 1] + 10.0 * u[n - 2] - 18.0 * u[n - 3] + 6.0 * u[n - 4] - u[n - 5]) / (12.0 * h);
    } else {
      du = (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]) / (12.0 * h);
    }
    worst = std::max(worst, std::abs(u[i] * (du + v.d1(p.x[i])) - p.c));
  }
  return worst;
}

void write_profile_csv(std::ostream& os, const StationaryProfile& p) {
  os << "# c=" << format_real(p.c) << '\n';
  os << "x,u\n";
  for (std::size_t i = 0; i < p.x.size(); ++i) write_csv_row(os, {p.x[i], p.u[i]});
}

}  // namespace degdiff::stationary
