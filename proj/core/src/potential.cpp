#include "degdiff/potential.hpp"

#include <cmath>
#include <stdexcept>

#include "degdiff/errors.hpp"

namespace degdiff {

Potential::Potential(Expr value, int dimension)
    : value_(std::move(value)),
      gradient_{differentiate(value_, Variable::X1), differentiate(value_, Variable::X2)},
      dimension_(dimension) {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("Potential: dimension must be 1 or 2");
  if (dimension == 1 && depends_on(*value_, Variable::X2))
    throw std::invalid_argument("Potential: a one-dimensional potential cannot depend on x2");
}

Potential Potential::parse(std::string_view text, int dimension) { return Potential(parse_expression(text), dimension); }

Potential Potential::reflected() const {
  Expr mirror = make_binary(ExprNode::Kind::Sub, make_constant(1.0), make_variable(Variable::X1));
  return Potential(substitute(value_, Variable::X1, mirror), dimension_);
}

Expr derivative(const Potential& p, Variable var) { return p.gradient(var); }

namespace {

template <typename Better>
Extremum search(const Expr& f, double a, double b, int samples, Better better) {
  if (!(b >= a)) throw std::invalid_argument("extremum search: empty interval");
  if (samples < 2) samples = 2;
  const double h = (b - a) / (samples - 1);
  int best = 0;
  double best_value = evaluate(*f, a);
  for (int i = 1; i < samples; ++i) {
    const double x = (i == samples - 1) ? b : a + i * h;
    const double v = evaluate(*f, x);
    if (better(v, best_value)) {
      best_value = v;
      best = i;
    }
  }
  double lo = best > 0 ? a + (best - 1) * h : a;
  double hi = best < samples - 1 ? a + (best + 1) * h : b;
  Extremum result{best_value, best == samples - 1 ? b : a + best * h};

  // Golden-section refinement inside [lo, hi].
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = evaluate(*f, x1);
  double f2 = evaluate(*f, x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (better(f1, f2)) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = evaluate(*f, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = evaluate(*f, x2);
    }
  }
  for (double x : {x1, x2, lo, hi}) {
    const double v = evaluate(*f, x);
    if (better(v, result.value)) result = {v, x};
  }
  return result;
}

}  // namespace

Extremum maximize(const Expr& f, double a, double b, int samples) {
  return search(f, a, b, samples, [](double u, double v) { return u > v; });
}

Extremum minimize(const Expr& f, double a, double b, int samples) {
  return search(f, a, b, samples, [](double u, double v) { return u < v; });
}

Extremum max_value(const Potential& p, double a, double b, int samples) {
  if (p.dimension() != 1) throw std::invalid_argument("max_value: potential must be one-dimensional");
  return maximize(p.expression(), a, b, samples);
}

}  // namespace degdiff
