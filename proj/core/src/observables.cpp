#include "degdiff/observables.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "degdiff/csv.hpp"
#include "degdiff/errors.hpp"

namespace degdiff {

double boundary_current(const fem::Discretization& disc, const fem::Vector& u_new, const fem::Vector& u_prev,
                        const std::vector<BoundaryTag>& tags) {
  std::vector<int> nodes;
  for (BoundaryTag tag : tags) {
    if (!disc.boundary()[tag].is_dirichlet())
      throw std::invalid_argument("boundary_current: segment Gamma" + std::to_string(static_cast<int>(tag)) +
                                  " is zero-flux");
    const std::vector<int> of_tag = disc.dirichlet_nodes_of(tag);
    nodes.insert(nodes.end(), of_tag.begin(), of_tag.end());
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const fem::Vector r = disc.residual(u_new, u_prev);
  double flux = 0.0;
  for (int k : nodes) flux -= r[k];
  return flux;
}

Currents device_currents(const fem::StepView& step) {
  const fem::BoundarySpec& bc = step.disc.boundary();
  std::vector<BoundaryTag> left;
  for (BoundaryTag tag : {BoundaryTag::Gamma4, BoundaryTag::Gamma5})
    if (bc[tag].is_dirichlet()) left.push_back(tag);
  if (left.empty() || !bc[BoundaryTag::Gamma2].is_dirichlet())
    throw std::invalid_argument("device_currents: need Dirichlet data on Gamma2 and on Gamma4 or Gamma5");
  Currents c;
  c.left = -boundary_current(step.disc, step.u_new, step.u_prev, left);
  c.right = boundary_current(step.disc, step.u_new, step.u_prev, {BoundaryTag::Gamma2});
  return c;
}

double projected_current(const Mesh& mesh, const fem::VectorField& j, const std::vector<BoundaryTag>& tags) {
  double flux = 0.0;
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    if (std::find(tags.begin(), tags.end(), e.tag) == tags.end()) continue;
    const Point& a = mesh.vertices[e.v[0]];
    const Point& b = mesh.vertices[e.v[1]];
    double n1 = 0.0, n2 = 0.0;
    switch (e.tag) {
      case BoundaryTag::Gamma1: n2 = -1.0; break;
      case BoundaryTag::Gamma2: n1 = 1.0; break;
      case BoundaryTag::Gamma3: n2 = 1.0; break;
      case BoundaryTag::Gamma4:
      case BoundaryTag::Gamma5: n1 = -1.0; break;
    }
    const double len = std::hypot(b.x1 - a.x1, b.x2 - a.x2);
    const double ja = j.x1[e.v[0]] * n1 + j.x2[e.v[0]] * n2;
    const double jb = j.x1[e.v[1]] * n1 + j.x2[e.v[1]] * n2;
    flux += 0.5 * len * (ja + jb);
  }
  return flux;
}

namespace {

// Integral over a triangle of area `area` of max(-u, 0) for the linear
// function with vertex values a, b, c.
double negative_part(double area, double a, double b, double c) {
  std::array<double, 3> v{a, b, c};
  std::sort(v.begin(), v.end());  // v0 <= v1 <= v2
  if (v[0] >= 0.0) return 0.0;
  if (v[2] <= 0.0) return -area * (v[0] + v[1] + v[2]) / 3.0;
  if (v[1] <= 0.0) {
    // Only v2 positive: positive part is a corner triangle.
    const double pos = area * v[2] * v[2] * v[2] / (3.0 * (v[2] - v[0]) * (v[2] - v[1]));
    return pos - area * (v[0] + v[1] + v[2]) / 3.0;
  }
  const double m = -v[0];
  return area * m * m * m / (3.0 * (v[1] - v[0]) * (v[2] - v[0]));
}

}  // namespace

double l1_norm(const Mesh& mesh, const fem::Vector& u) {
  if (u.size() != static_cast<Eigen::Index>(mesh.num_vertices()))
    throw std::invalid_argument("l1_norm: field size mismatch");
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(static_cast<int>(t));
    const double a = u[tri[0]], b = u[tri[1]], c = u[tri[2]];
    total += area * (a + b + c) / 3.0 + 2.0 * negative_part(area, a, b, c);
  }
  return total;
}

void TimeSeries::record(double t, double value) {
  if (!std::isfinite(t)) throw std::invalid_argument("TimeSeries::record: time must be finite");
  if (!samples_.empty() && !(t > samples_.back().first))
    throw std::invalid_argument("TimeSeries::record: time " + format_real(t) + " does not exceed last sample " +
                                format_real(samples_.back().first));
  samples_.emplace_back(t, value);
}

void TimeSeries::write_csv(std::ostream& out) const {
  out << "t," << name_ << '\n';
  for (const auto& [t, v] : samples_) out << format_real(t) << ',' << format_real(v) << '\n';
}

TimeSeries record(TimeSeries series, double t, double value) {
  series.record(t, value);
  return series;
}

}  // namespace degdiff
