#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "oracles.hpp"
#include "torsio/chebyshev.hpp"
#include "torsio/polygon.hpp"
#include "torsio/shapes.hpp"

using namespace torsio;

namespace {

ConvexPolygon unit_square() { return ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

ConvexPolygon equilateral() {
  return ConvexPolygon::from_vertices({{-0.5, 0.0}, {0.5, 0.0}, {0.0, std::sqrt(3.0) / 2.0}});
}

}  // namespace

TEST(Polygon, UnitSquareMetrics) {
  const auto sq = unit_square();
  EXPECT_DOUBLE_EQ(sq.area(), 1.0);
  EXPECT_DOUBLE_EQ(sq.perimeter(), 4.0);
  EXPECT_NEAR(sq.cotangent_sum(), 4.0, 1e-14);
  EXPECT_NEAR(isoperimetric_defect(sq), 0.0, 1e-14);
}

TEST(Polygon, EquilateralTriangleMetrics) {
  const auto t = equilateral();
  EXPECT_NEAR(t.area(), std::sqrt(3.0) / 4.0, 1e-15);
  EXPECT_NEAR(t.perimeter(), 3.0, 1e-15);
  EXPECT_NEAR(t.cotangent_sum(), 3.0 * std::sqrt(3.0), 1e-13);
}

TEST(Polygon, RectangleMetricsAndDefect) {
  const auto r = rectangle_strip(4.0);
  EXPECT_DOUBLE_EQ(r.area(), 8.0);
  EXPECT_DOUBLE_EQ(r.perimeter(), 12.0);
  const auto r32 = ConvexPolygon::from_vertices({{0, 0}, {3, 0}, {3, 2}, {0, 2}});
  EXPECT_NEAR(isoperimetric_defect(r32), 100.0 / 16.0 - 6.0, 1e-13);
}

TEST(Polygon, CotangentSumMatchesAngleOracle) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto p = random_convex(7, seed);
    const double ref = oracle::cot_sum_by_angles(p.vertices(), 0.0);
    EXPECT_NEAR(p.cotangent_sum(), ref, 1e-10 * ref) << "seed " << seed;
    EXPECT_GE(p.cotangent_sum(), std::numbers::pi);
  }
}

TEST(Polygon, DefectNonnegativeOnRandomPolygons) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto p = random_convex(3 + static_cast<int>(seed % 15), seed);
    EXPECT_GE(isoperimetric_defect(p), -1e-12 * p.area());
  }
}

TEST(Polygon, CotangentSumStableAtSharpVertices) {
  // thin isosceles triangles: two angles close to 0 and one close to pi
  for (double k : {10.0, 100.0, 1000.0}) {
    const auto t = isosceles_T(k);
    const double ref = oracle::cot_sum_by_angles(t.vertices(), 0.0);
    EXPECT_NEAR(t.cotangent_sum(), ref, 1e-9 * ref);
  }
}

TEST(Polygon, NormalizesOrientationAndMergesCollinear) {
  const auto cw = ConvexPolygon::from_vertices({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_GT(cw.area(), 0.0);
  EXPECT_EQ(cw.size(), 4u);
  const auto with_mid = ConvexPolygon::from_vertices({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 1}});
  EXPECT_EQ(with_mid.size(), 4u);
  EXPECT_DOUBLE_EQ(with_mid.area(), 1.0);
  EXPECT_EQ(with_mid.vertex(0), (Vec2{0, 0}));
}

TEST(Polygon, RejectsBadInput) {
  auto kind_of = [](std::initializer_list<Vec2> pts) -> std::optional<ErrorKind> {
    try {
      ConvexPolygon::from_vertices(pts);
    } catch (const Error& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  EXPECT_EQ(kind_of({{0, 0}, {2, 0}, {2, 2}, {1, 0.5}, {0, 2}}), ErrorKind::NotConvex);
  EXPECT_EQ(kind_of({{0, 0}, {1, 1}, {2, 2}}), ErrorKind::Degenerate);
  EXPECT_EQ(kind_of({{0, 0}, {1, 0}}), ErrorKind::Degenerate);
  EXPECT_EQ(kind_of({{0, 0}, {0, 0}, {0, 0}}), ErrorKind::Degenerate);
  EXPECT_THROW(ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {0, std::nan("")}}), Error);
}

TEST(Polygon, InvariantUnderRigidMotionAndScaling) {
  const auto p = random_convex(9, 42);
  const auto q = p.rotated(0.7).translated({3.0, -2.0});
  EXPECT_NEAR(q.area(), p.area(), 1e-13);
  EXPECT_NEAR(q.perimeter(), p.perimeter(), 1e-13);
  EXPECT_NEAR(q.cotangent_sum(), p.cotangent_sum(), 1e-12);
  const auto s = p.scaled(3.0);
  EXPECT_NEAR(s.area(), 9.0 * p.area(), 1e-12);
  EXPECT_NEAR(s.cotangent_sum(), p.cotangent_sum(), 1e-12);
}

TEST(Polygon, CentroidAndDiameter) {
  const auto sq = unit_square();
  EXPECT_NEAR(sq.centroid().x, 0.5, 1e-15);
  EXPECT_NEAR(sq.centroid().y, 0.5, 1e-15);
  EXPECT_NEAR(sq.diameter(), std::sqrt(2.0), 1e-15);
}

TEST(Chebyshev, SquareAndTriangle) {
  const auto d = chebyshev_disk(unit_square());
  EXPECT_NEAR(d.radius, 0.5, 1e-12);
  EXPECT_NEAR(d.center.x, 0.5, 1e-12);
  EXPECT_NEAR(d.center.y, 0.5, 1e-12);
  const auto t = equilateral();
  EXPECT_NEAR(chebyshev_disk(t).radius, t.area() / (0.5 * t.perimeter()), 1e-12);
}

TEST(Chebyshev, TrianglesMatchAreaOverSemiperimeter) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto t = random_convex(3, seed);
    if (t.size() != 3) continue;
    EXPECT_NEAR(chebyshev_disk(t).radius, 2.0 * t.area() / t.perimeter(), 1e-10);
  }
}

TEST(Chebyshev, DiskIsInsideAndTouches) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto p = random_convex(12, seed);
    const auto d = chebyshev_disk(p);
    double dmin = 1e300;
    for (std::size_t i = 0; i < p.size(); ++i) dmin = std::min(dmin, p.edge_line(i).signed_distance(d.center));
    EXPECT_NEAR(dmin, d.radius, 1e-10);
  }
}
