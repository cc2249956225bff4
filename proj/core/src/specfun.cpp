#include "degdiff/specfun.hpp"

#include <cmath>
#include <numbers>

#include "degdiff/errors.hpp"

namespace degdiff::specfun {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kDomainSlack = 1e-15;
constexpr int kMaxIterations = 50;

bool converged(double step, double w) { return std::abs(step) < 1e-15 * (1.0 + std::abs(w)); }

// W0 expanded around the branch point, p = sqrt(2 (e y + 1)).
double branch_point_series(double p) {
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))));
}

// Halley iteration on w e^w = y, for y in (-1/e, e).
double halley_w0(double y, double w) {
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - y;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (converged(step, w)) break;
  }
  return w;
}

}  // namespace

double x_minus_log1p(double x) {
  if (std::abs(x) < 0.1) {
    // sum_{k>=2} (-1)^k x^k / k
    double term = x * x;
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      const double contrib = ((k % 2 == 0) ? term : -term) / k;
      sum += contrib;
      if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
      term *= x;
    }
    return sum;
  }
  return x - std::log1p(x);
}

double lambert_w0(double y) {
  if (!(y >= -kInvE - kDomainSlack)) throw BranchDomainError(y, LambertBranch::W0);
  if (y == 0.0) return 0.0;
  if (y >= kE) return lambert_w0_exp(std::log(y));

  const double q = y + kInvE;
  if (q <= 0.0) return -1.0;
  const double p = std::sqrt(2.0 * kE * q);
  if (p < 1e-3) return branch_point_series(p);

  double w;
  if (y < -0.25) {
    w = branch_point_series(p);
  } else {
    // Winitzki's uniform approximation.
    const double l = std::log1p(y);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  return halley_w0(y, w);
}

double lambert_w0_exp(double log_y) {
  if (log_y < 1.0) return lambert_w0(std::exp(log_y));
  // Solve w + ln w = log_y, w >= 1.
  const double l2 = std::log(log_y);
  double w = log_y - l2 + l2 / log_y;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = w + std::log(w) - log_y;
    const double g1 = 1.0 + 1.0 / w;
    const double g2 = -1.0 / (w * w);
    const double step = g / (g1 - g * g2 / (2.0 * g1));
    w -= step;
    if (converged(step, w)) break;
  }
  return w;
}

double lambert_w_upper_excess(double excess) {
  if (!(excess > 0.0)) {
    if (excess > -kDomainSlack) return 1.0;
    throw BranchDomainError(std::exp(1.0 + excess), LambertBranch::Upper);
  }
  // Work with p = w - 1 >= 0, solving p - log1p(p) = excess.
  double p;
  if (excess < 0.5) {
    const double s = std::sqrt(2.0 * excess);
    p = s * (1.0 + s * (1.0 / 3.0 + s / 36.0));
    if (s < 1e-4) return 1.0 + p;
  } else {
    const double l = 1.0 + excess;
    const double ll = std::log(l);
    p = l + ll + ll / l - 1.0;
  }
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = x_minus_log1p(p) - excess;
    const double g1 = p / (1.0 + p);
    const double g2 = 1.0 / ((1.0 + p) * (1.0 + p));
    const double step = g / (g1 - g * g2 / (2.0 * g1));
    p -= step;
    if (p < 0.0) p = 0.5 * (p + step);
    if (converged(step, 1.0 + p)) break;
  }
  return 1.0 + p;
}

double lambert_w_upper(double y) {
  if (!(y >= kE - kDomainSlack)) throw BranchDomainError(y, LambertBranch::Upper);
  if (y <= kE) return 1.0;
  return lambert_w_upper_excess(std::log1p((y - kE) / kE));
}

}  // namespace degdiff::specfun
