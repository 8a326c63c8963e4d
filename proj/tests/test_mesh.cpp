#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <map>
#include <set>

#include "oracles.hpp"
#include "torsio/io.hpp"
#include "torsio/mesh.hpp"
#include "torsio/shapes.hpp"

using namespace torsio;

namespace {

const ConvexPolygon kSquare = ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});

// Count of triangles with max edge <= h covering area A is at least A / (sqrt(3)/4 h^2).
void expect_count_band(const TriMesh& m, double area) {
  const double h = m.h;
  EXPECT_GE(static_cast<double>(m.num_triangles()), area / (std::sqrt(3.0) / 4.0 * h * h));
  EXPECT_LE(static_cast<double>(m.num_triangles()), 10.0 * area / (h * h) + 50.0);
}

bool on_boundary(const ConvexPolygon& p, Vec2 x) {
  double d = INFINITY;
  for (std::size_t e = 0; e < p.size(); ++e) d = std::min(d, std::abs(p.edge_line(e).signed_distance(x)));
  return d < 1e-12;
}

}  // namespace

TEST(Mesh, CoarseSquare) {
  // h must stay below the inradius 0.5
  const TriMesh m = triangulate(kSquare, 0.49);
  validate_mesh(m, kSquare);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
  EXPECT_LE(m.max_edge(), 0.49 * (1 + 1e-12));
  EXPECT_GE(m.min_angle(), 20.0 * std::numbers::pi / 180.0);
  int interior = 0;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    EXPECT_EQ(m.boundary_flags[i], on_boundary(kSquare, m.nodes[i])) << i;
    interior += !m.boundary_flags[i];
  }
  EXPECT_GT(interior, 0);
  expect_count_band(m, 1.0);
}

TEST(Mesh, BoundaryEdgesAreExactlyFlaggedPairs) {
  const TriMesh m = triangulate(kSquare, 0.1);
  std::map<std::uint64_t, int> count;
  for (const auto& t : m.triangles)
    for (int i = 0; i < 3; ++i) ++count[detail::edge_key(t[i], t[(i + 1) % 3])];
  double boundary_length = 0.0;
  for (const auto& [key, c] : count) {
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    if (c == 1) boundary_length += norm(m.nodes[a] - m.nodes[b]);
  }
  EXPECT_NEAR(boundary_length, 4.0, 1e-12);
}

TEST(Mesh, QualityAndSizeAcrossShapes) {
  struct Case {
    ConvexPolygon poly;
    double h_factor;
    double min_angle_deg;
  };
  const std::vector<Case> cases = {
      {regular_polygon(3, 1.0), 0.2, 25.0},
      {regular_polygon_with_inradius(256, 1.0), 0.1, 25.0},
      {isosceles_T(2.0), 0.2, 15.0},
      {rectangle_strip(20.0), 0.5, 25.0},
      {ConvexPolygon::from_vertices({{0, 0}, {4, 0}, {3, 2}, {0, 1.5}}), 0.15, 25.0},
  };
  for (const auto& c : cases) {
    const double h = c.h_factor * inradius(c.poly);
    const TriMesh m = triangulate(c.poly, h);
    validate_mesh(m, c.poly);
    EXPECT_NEAR(m.total_area(), c.poly.area(), 1e-12 * c.poly.area());
    EXPECT_LE(m.max_edge(), h * (1 + 1e-12));
    EXPECT_GE(m.min_angle(), c.min_angle_deg * std::numbers::pi / 180.0);
    expect_count_band(m, c.poly.area());
  }
}

TEST(Mesh, RandomPolygonsValidate) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto p = random_convex(5 + static_cast<int>(seed % 30), seed);
    const TriMesh m = triangulate(p, 0.25 * inradius(p));
    EXPECT_NO_THROW(validate_mesh(m, p)) << seed;
    EXPECT_LE(m.max_edge(), 0.25 * inradius(p) * (1 + 1e-12));
  }
}

TEST(Mesh, Deterministic) {
  const auto p = random_convex(12, 7);
  const TriMesh a = triangulate(p, 0.1), b = triangulate(p, 0.1);
  ASSERT_EQ(a.num_nodes(), b.num_nodes());
  ASSERT_EQ(a.triangles, b.triangles);
  for (std::size_t i = 0; i < a.num_nodes(); ++i) {
    EXPECT_EQ(a.nodes[i].x, b.nodes[i].x);
    EXPECT_EQ(a.nodes[i].y, b.nodes[i].y);
  }
}

TEST(Mesh, UniformRefinement) {
  const auto p = regular_polygon(5, 1.0);
  const TriMesh m = triangulate(p, 0.2);
  std::vector<std::array<int, 2>> parents;
  const TriMesh f = refine_uniform(m, &parents);
  validate_mesh(f, p);
  EXPECT_EQ(f.num_triangles(), 4 * m.num_triangles());
  EXPECT_EQ(f.num_nodes(), m.num_nodes() + parents.size());
  EXPECT_DOUBLE_EQ(f.h, 0.5 * m.h);
  EXPECT_NEAR(f.max_edge(), 0.5 * m.max_edge(), 1e-15);
  EXPECT_NEAR(f.min_angle(), m.min_angle(), 1e-12);
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const Vec2 mid = 0.5 * (m.nodes[parents[i][0]] + m.nodes[parents[i][1]]);
    EXPECT_EQ(f.nodes[m.num_nodes() + i].x, mid.x);
    EXPECT_EQ(f.boundary_flags[m.num_nodes() + i], on_boundary(p, mid));
  }
  // Euler characteristic of a disk: V - E + F = 1
  std::set<std::uint64_t> edges;
  for (const auto& t : f.triangles)
    for (int i = 0; i < 3; ++i) edges.insert(detail::edge_key(t[i], t[(i + 1) % 3]));
  EXPECT_EQ(static_cast<long>(f.num_nodes()) - static_cast<long>(edges.size()) + static_cast<long>(f.num_triangles()),
            1);
}

TEST(Mesh, InvalidSizes) {
  for (double h : {0.0, -1.0, 0.5, 0.7, std::nan("")}) {
    try {
      triangulate(kSquare, h);
      FAIL() << h;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument) << h;
    }
  }
}

TEST(Mesh, VertexBudgetExhaustion) {
  MeshOptions opt;
  opt.vertex_budget_factor = 1e-3;
  try {
    triangulate(regular_polygon(6, 1.0), 0.01, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MeshFailure);
  }
}

TEST(Mesh, ValidatorRejectsDamage) {
  TriMesh m = triangulate(kSquare, 0.3);
  TriMesh flipped = m;
  std::swap(flipped.triangles[0][1], flipped.triangles[0][2]);
  EXPECT_THROW(validate_mesh(flipped, kSquare), Error);
  TriMesh missing = m;
  missing.triangles.pop_back();
  EXPECT_THROW(validate_mesh(missing, kSquare), Error);
  TriMesh unflagged = m;
  for (std::size_t i = 0; i < unflagged.num_nodes(); ++i)
    if (unflagged.boundary_flags[i]) {
      unflagged.boundary_flags[i] = false;
      break;
    }
  EXPECT_THROW(validate_mesh(unflagged, kSquare), Error);
}

TEST(Mesh, JsonShape) {
  const TriMesh m = triangulate(kSquare, 0.3);
  const io::Json j = io::to_json(m);
  EXPECT_EQ(j["nodes"].size(), m.num_nodes());
  EXPECT_EQ(j["triangles"].size(), m.num_triangles());
  EXPECT_EQ(j["boundary"].size(), m.num_nodes());
  EXPECT_EQ(j["h"].get<double>(), 0.3);
  const io::Json back = io::parse_json(j.dump());
  EXPECT_EQ(back["nodes"][3][0].get<double>(), m.nodes[3].x);
}
