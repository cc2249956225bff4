#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace degdiff {

/// The five half-open segments of the unit-square boundary.
///   Gamma1: x2 = 0, 0 < x1 <= 1        Gamma2: x1 = 1, 0 < x2 <= 1
///   Gamma3: x2 = 1, 0 <= x1 < 1        Gamma4: x1 = 0, 1/2 <= x2 < 1
///   Gamma5: x1 = 0, 0 <= x2 < 1/2
enum class BoundaryTag { Gamma1 = 1, Gamma2, Gamma3, Gamma4, Gamma5 };

inline constexpr std::array<BoundaryTag, 5> kAllTags = {BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3,
                                                       BoundaryTag::Gamma4, BoundaryTag::Gamma5};

inline constexpr int tag_index(BoundaryTag t) { return static_cast<int>(t) - 1; }

struct Point {
  double x1;
  double x2;
};

struct BoundaryEdge {
  std::array<int, 2> v;
  BoundaryTag tag;
};

/// Conforming triangulation of [0,1]^2. Triangles are counter-clockwise.
struct Mesh {
  int n = 0;  // cells per side
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  /// Owning segment of each boundary vertex; empty for interior vertices.
  std::vector<std::optional<BoundaryTag>> vertex_tags;

  double triangle_area(int t) const;
  std::size_t num_vertices() const noexcept { return vertices.size(); }
};

enum class MeshPattern {
  SingleDiagonal,  // two triangles per cell, lower-left to upper-right
  Crossed,         // four triangles per cell around an added centre vertex
};

/// Uniform (n+1) x (n+1) grid of cells split by `pattern`. n must be even
/// so that x2 = 1/2 is a grid line. Crossed meshes append the n^2 cell
/// centres after the grid vertices.
Mesh build_structured(int n, MeshPattern pattern = MeshPattern::SingleDiagonal);

/// Tag of a boundary point (within 1e-12); throws std::invalid_argument for
/// interior points.
BoundaryTag classify_boundary(double x1, double x2);

/// Vertex and triangle listings for external plotting.
void write_mesh_csv(std::ostream& vertices_out, std::ostream& triangles_out, const Mesh& mesh);

}  // namespace degdiff
