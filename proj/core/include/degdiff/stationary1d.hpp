#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "degdiff/potential.hpp"

// Stationary solutions of (u (u + V)')' = 0 on [0,1]. Every solution
// satisfies u (u' + V') = c for a flux constant c; for c != 0 the profile is
// strictly positive and solves u' = c/u - V'.

namespace degdiff::stationary {

struct DirichletPair {
  double left;   // u(0)
  double right;  // u(1)
};

/// Sampled profile u(x) with its flux constant c. The physical current is -c.
struct StationaryProfile {
  std::vector<double> x;
  std::vector<double> u;
  double c = 0.0;
};

struct CriticalValues {
  double u0_crit;  // V_M - V(0)
  double u1_crit;  // V_M - V(1)
  double v_max;
  double v_left;
  double v_right;
  double argmax;
};

/// Degenerate c -> 0+ limit of the Cauchy solution started from u0.
///
/// The vacuum intervals [x_i, y_i] are where the limit vanishes; between
/// them it equals level - V(x), with level = u0 + V(0) on [0, x_1] and
/// level = V(y_i) on [y_i, x_{i+1}]. The last interval may be [1, 1].
class LimitProfile {
 public:
  struct Vacuum {
    double x;
    double y;
  };

  LimitProfile(double u0, Potential v, std::vector<Vacuum> vacua);

  double operator()(double x) const;
  const std::vector<Vacuum>& vacua() const noexcept { return vacua_; }
  /// x_1, y_1, x_2, y_2, ... in order.
  std::vector<double> breakpoints() const;
  double u0() const noexcept { return u0_; }

  StationaryProfile sample(std::span<const double> grid) const;

 private:
  double u0_;
  Potential v_;
  std::vector<Vacuum> vacua_;
};

struct CauchyOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// Adaptive steps allowed between two output points before falling back
  /// to the piecewise closed-form propagator.
  int max_steps = 4'000'000;
  int fallback_intervals = 4096;
};

struct ShootingOptions {
  double tol = 1e-8;
  int grid_points = 1001;
  double c_max = 1e6;
  int max_iterations = 200;
  CauchyOptions cauchy{};
};

/// `points` uniformly spaced nodes covering [0,1], endpoints exact.
std::vector<double> uniform_grid(int points);

/// Closed-form solution of u' = c/u - alpha, u(0) = u0, evaluated at dx.
/// Requires dx >= 0, u0 > 0, c > 0.
double phi(double dx, double u0, double c, double alpha);

/// Chains `phi` across a partition with piecewise constant slopes:
/// alphas[i] is the slope on [partition[i], partition[i+1]].
StationaryProfile propagate_piecewise(std::span<const double> partition, std::span<const double> alphas, double u0,
                                      double c);

/// Solves u' = c/u - V'(x) from u(grid.front()) = u0 and samples the
/// solution on `grid`. For c < 0 this is the backward problem of the
/// reflected potential; CollapseError is thrown if u drops below 1e-12.
StationaryProfile integrate_cauchy(double u0, double c, const Potential& v, std::span<const double> grid,
                                   const CauchyOptions& options = {});

struct Envelope {
  StationaryProfile lower;  // phi(x, u0, c, max V')
  StationaryProfile upper;  // phi(x, u0, c, min V')
  double alpha_max;
  double alpha_min;
};

Envelope envelope(double u0, double c, const Potential& v, std::span<const double> grid);

CriticalValues critical_values(const Potential& v);

/// Breakpoints are located to 1e-10 or better.
LimitProfile limit_profile(double u0, const Potential& v);

/// Monotone shooting on c. Throws NotCoveredError when both data are
/// subcritical and BracketError when c would have to exceed c_max.
StationaryProfile solve_bvp(DirichletPair data, const Potential& v, const ShootingOptions& options = {});

/// The physical current J = -c.
double stationary_current(const StationaryProfile& p);

/// max over interior nodes of |u (u' + V') - c|, u' by fourth-order
/// differences. Requires a uniform grid with at least 5 nodes.
double product_form_residual(const StationaryProfile& p, const Potential& v);

/// Two-column CSV `x,u` preceded by a `# c=<value>` comment line.
void write_profile_csv(std::ostream& os, const StationaryProfile& p);

}  // namespace degdiff::stationary
