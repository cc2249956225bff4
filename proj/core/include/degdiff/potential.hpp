#pragma once

#include <array>
#include <string>
#include <string_view>

#include "degdiff/expression.hpp"

namespace degdiff {

/// A C^1 scalar potential V on [0,1] (dimension 1, variable x1) or on the
/// unit square (dimension 2). The gradient is derived symbolically at
/// construction, so value and gradient always agree.
class Potential {
 public:
  Potential(Expr value, int dimension);

  /// Parse `text`; a 1D potential may not reference x2.
  static Potential parse(std::string_view text, int dimension = 1);

  int dimension() const noexcept { return dimension_; }
  const Expr& expression() const noexcept { return value_; }
  const Expr& gradient(Variable var) const noexcept { return gradient_[var == Variable::X1 ? 0 : 1]; }

  double operator()(double x1, double x2 = 0.0) const { return evaluate(*value_, x1, x2); }
  /// dV/dx1.
  double d1(double x1, double x2 = 0.0) const { return evaluate(*gradient_[0], x1, x2); }
  double d2(double x1, double x2 = 0.0) const { return evaluate(*gradient_[1], x1, x2); }

  /// V(1 - x1), the potential seen from the right end.
  Potential reflected() const;

  std::string to_string() const { return degdiff::to_string(*value_); }

 private:
  Expr value_;
  std::array<Expr, 2> gradient_;
  int dimension_;
};

/// Symbolic partial derivative of the potential.
Expr derivative(const Potential& p, Variable var);

struct Extremum {
  double value;
  double location;
};

/// Maximum of an x1-only expression on [a, b]: dense sampling followed by
/// golden-section refinement around the best sample.
Extremum maximize(const Expr& f, double a, double b, int samples = 10000);
Extremum minimize(const Expr& f, double a, double b, int samples = 10000);

/// V_M = max V on [a, b] and its location.
Extremum max_value(const Potential& p, double a = 0.0, double b = 1.0, int samples = 10000);

}  // namespace degdiff
