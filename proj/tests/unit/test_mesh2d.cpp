#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "degdiff/mesh2d.hpp"

using namespace degdiff;

namespace {

double total_area(const Mesh& m) {
  double a = 0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) a += m.triangle_area(static_cast<int>(t));
  return a;
}

}  // namespace

TEST(BuildStructured, Counts) {
  Mesh m = build_structured(2);
  EXPECT_EQ(m.vertices.size(), 9u);
  EXPECT_EQ(m.triangles.size(), 8u);
  m = build_structured(100);
  EXPECT_EQ(m.vertices.size(), 10201u);
  EXPECT_EQ(m.triangles.size(), 20000u);
  EXPECT_EQ(m.boundary_edges.size(), 400u);
}

TEST(BuildStructured, CrossedCounts) {
  const Mesh m = build_structured(4, MeshPattern::Crossed);
  EXPECT_EQ(m.vertices.size(), 25u + 16u);
  EXPECT_EQ(m.triangles.size(), 64u);
  EXPECT_NEAR(total_area(m), 1.0, 1e-12);
}

TEST(BuildStructured, AreaAndOrientation) {
  for (int n : {2, 10, 100}) {
    const Mesh m = build_structured(n);
    EXPECT_NEAR(total_area(m), 1.0, 1e-12) << n;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) EXPECT_GT(m.triangle_area(static_cast<int>(t)), 0.0);
  }
}

TEST(BuildStructured, RejectsOddOrNonPositive) {
  EXPECT_THROW(build_structured(3), std::invalid_argument);
  EXPECT_THROW(build_structured(0), std::invalid_argument);
}

TEST(BuildStructured, SegmentLengths) {
  const Mesh m = build_structured(10);
  std::map<BoundaryTag, double> len;
  for (const BoundaryEdge& e : m.boundary_edges) {
    const Point& a = m.vertices[e.v[0]];
    const Point& b = m.vertices[e.v[1]];
    len[e.tag] += std::hypot(b.x1 - a.x1, b.x2 - a.x2);
  }
  EXPECT_NEAR(len[BoundaryTag::Gamma1], 1.0, 1e-12);
  EXPECT_NEAR(len[BoundaryTag::Gamma2], 1.0, 1e-12);
  EXPECT_NEAR(len[BoundaryTag::Gamma3], 1.0, 1e-12);
  EXPECT_NEAR(len[BoundaryTag::Gamma4], 0.5, 1e-12);
  EXPECT_NEAR(len[BoundaryTag::Gamma5], 0.5, 1e-12);
}

TEST(BuildStructured, VertexTagsFollowClassification) {
  const Mesh m = build_structured(8);
  int boundary = 0;
  for (std::size_t k = 0; k < m.vertices.size(); ++k) {
    const Point& p = m.vertices[k];
    const bool on = p.x1 == 0.0 || p.x1 == 1.0 || p.x2 == 0.0 || p.x2 == 1.0;
    ASSERT_EQ(on, m.vertex_tags[k].has_value());
    if (on) {
      ++boundary;
      EXPECT_EQ(*m.vertex_tags[k], classify_boundary(p.x1, p.x2));
    }
  }
  EXPECT_EQ(boundary, 32);
}

TEST(ClassifyBoundary, HalfOpenSegments) {
  EXPECT_EQ(classify_boundary(0.0, 0.25), BoundaryTag::Gamma5);
  EXPECT_EQ(classify_boundary(0.0, 0.5), BoundaryTag::Gamma4);
  EXPECT_EQ(classify_boundary(0.0, 0.0), BoundaryTag::Gamma5);
  EXPECT_EQ(classify_boundary(1.0, 0.0), BoundaryTag::Gamma1);
  EXPECT_EQ(classify_boundary(0.0, 1.0), BoundaryTag::Gamma3);
  EXPECT_EQ(classify_boundary(1.0, 1.0), BoundaryTag::Gamma2);
  EXPECT_EQ(classify_boundary(0.5, 1.0), BoundaryTag::Gamma3);
  EXPECT_EQ(classify_boundary(0.5, 0.0), BoundaryTag::Gamma1);
  EXPECT_EQ(classify_boundary(1.0, 0.3), BoundaryTag::Gamma2);
  EXPECT_THROW(classify_boundary(0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(classify_boundary(1.5, 0.0), std::invalid_argument);
}

TEST(MeshCsv, Shapes) {
  const Mesh m = build_structured(2);
  std::ostringstream v, t;
  write_mesh_csv(v, t, m);
  const std::string vs = v.str(), ts = t.str();
  EXPECT_EQ(std::count(vs.begin(), vs.end(), '\n'), 10);
  EXPECT_EQ(std::count(ts.begin(), ts.end(), '\n'), 9);
}
