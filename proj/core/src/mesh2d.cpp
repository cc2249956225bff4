#include "degdiff/mesh2d.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "degdiff/csv.hpp"

namespace degdiff {

namespace {
constexpr double kOnBoundary = 1e-12;
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x1 - a.x1) * (c.x2 - a.x2) - (c.x1 - a.x1) * (b.x2 - a.x2));
}

BoundaryTag classify_boundary(double x1, double x2) {
  const bool left = std::abs(x1) <= kOnBoundary;
  const bool right = std::abs(x1 - 1.0) <= kOnBoundary;
  const bool bottom = std::abs(x2) <= kOnBoundary;
  const bool top = std::abs(x2 - 1.0) <= kOnBoundary;
  if (x1 < -kOnBoundary || x1 > 1.0 + kOnBoundary || x2 < -kOnBoundary || x2 > 1.0 + kOnBoundary)
    throw std::invalid_argument("classify_boundary: point outside the unit square");
  if (left) {
    if (top) return BoundaryTag::Gamma3;  // (0,1)
    return x2 < 0.5 - kOnBoundary ? BoundaryTag::Gamma5 : BoundaryTag::Gamma4;
  }
  if (right) return bottom ? BoundaryTag::Gamma1 : BoundaryTag::Gamma2;
  if (bottom) return BoundaryTag::Gamma1;
  if (top) return BoundaryTag::Gamma3;
  throw std::invalid_argument("classify_boundary: point is interior");
}

Mesh build_structured(int n, MeshPattern pattern) {
  if (n < 1) throw std::invalid_argument("build_structured: n must be positive");
  if (n % 2 != 0) throw std::invalid_argument("build_structured: n must be even");
  Mesh mesh;
  mesh.n = n;
  const int side = n + 1;
  auto id = [side](int i, int j) { return j * side + i; };

  mesh.vertices.reserve(static_cast<std::size_t>(side) * side);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({i == n ? 1.0 : static_cast<double>(i) / n, j == n ? 1.0 : static_cast<double>(j) / n});

  const bool crossed = pattern == MeshPattern::Crossed;
  if (crossed)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) mesh.vertices.push_back({(i + 0.5) / n, (j + 0.5) / n});

  mesh.triangles.reserve((crossed ? 4 : 2) * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (crossed) {
        const int e = side * side + j * n + i;
        mesh.triangles.push_back({a, b, e});
        mesh.triangles.push_back({b, c, e});
        mesh.triangles.push_back({c, d, e});
        mesh.triangles.push_back({d, a, e});
      } else {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      }
    }
  }

  auto add_edge = [&mesh](int p, int q) {
    const Point& a = mesh.vertices[p];
    const Point& b = mesh.vertices[q];
    mesh.boundary_edges.push_back({{p, q}, classify_boundary(0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2))});
  };
  // Counter-clockwise walk along the boundary.
  for (int i = 0; i < n; ++i) add_edge(id(i, 0), id(i + 1, 0));
  for (int j = 0; j < n; ++j) add_edge(id(n, j), id(n, j + 1));
  for (int i = n; i > 0; --i) add_edge(id(i, n), id(i - 1, n));
  for (int j = n; j > 0; --j) add_edge(id(0, j), id(0, j - 1));

  mesh.vertex_tags.assign(mesh.vertices.size(), std::nullopt);
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    for (int v : e.v) {
      if (!mesh.vertex_tags[v]) mesh.vertex_tags[v] = classify_boundary(mesh.vertices[v].x1, mesh.vertices[v].x2);
    }
  }
  return mesh;
}

void write_mesh_csv(std::ostream& vertices_out, std::ostream& triangles_out, const Mesh& mesh) {
  vertices_out << "index,x1,x2,tag\n";
  for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
    vertices_out << k << ',' << format_real(mesh.vertices[k].x1) << ',' << format_real(mesh.vertices[k].x2) << ','
                 << (mesh.vertex_tags[k] ? tag_index(*mesh.vertex_tags[k]) + 1 : 0) << '\n';
  }
  triangles_out << "v0,v1,v2\n";
  for (const auto& t : mesh.triangles) triangles_out << t[0] << ',' << t[1] << ',' << t[2] << '\n';
}

}  // namespace degdiff
