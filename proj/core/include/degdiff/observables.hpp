#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "degdiff/fem2d.hpp"

namespace degdiff {

/// Outward flux of J = -u+ grad u - u grad V through the union of `tags`,
/// from the weak-form residual at the constrained nodes of those segments.
/// Every tag must carry a Dirichlet condition in `disc`.
double boundary_current(const fem::Discretization& disc, const fem::Vector& u_new, const fem::Vector& u_prev,
                        const std::vector<BoundaryTag>& tags);

struct Currents {
  double left;   // inflow through the Dirichlet part of Gamma4 and Gamma5
  double right;  // outflow through Gamma2
};

/// Reported currents of a step. Left uses whichever of Gamma4/Gamma5 are
/// Dirichlet and is sign-flipped so that steady left and right agree.
Currents device_currents(const fem::StepView& step);

/// Outward flux through `tags` of a nodal vector field, trapezoidal on edges.
double projected_current(const Mesh& mesh, const fem::VectorField& j, const std::vector<BoundaryTag>& tags);

/// Integral of |u| over the unit square for a P1 field.
double l1_norm(const Mesh& mesh, const fem::Vector& u);
inline double l1_norm(const fem::Field& u) { return l1_norm(u.mesh(), u.values()); }

class TimeSeries {
 public:
  explicit TimeSeries(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  /// Appends (t, value); t must exceed the last sample time.
  void record(double t, double value);

  /// "t,<name>" header followed by one row per sample.
  void write_csv(std::ostream& out) const;

 private:
  std::string name_;
  std::vector<std::pair<double, double>> samples_;
};

TimeSeries record(TimeSeries series, double t, double value);

}  // namespace degdiff
