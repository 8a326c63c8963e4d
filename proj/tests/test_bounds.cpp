#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "torsio/bounds.hpp"
#include "torsio/shapes.hpp"

using namespace torsio;

namespace {

const ConvexPolygon kSquare = ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});

const BoundCheck& check(const BoundsReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

// Incircle radius of a triangle, 2A / L.
double triangle_inradius(const ConvexPolygon& t) { return 2.0 * t.area() / t.perimeter(); }

}  // namespace

TEST(Asymmetry, Gamma) {
  EXPECT_NEAR(gamma(regular_polygon(5, 2.0)), 1.0, 1e-14);
  EXPECT_NEAR(gamma(kSquare), 1.0, 1e-14);
  // T_2: base 2, legs sqrt(1 + 3/16), equilateral of the same area has perimeter 3
  EXPECT_NEAR(gamma(isosceles_T(2.0)), (2.0 + std::sqrt(0.75 + 4.0)) / 3.0, 1e-14);
  for (std::uint64_t s = 1; s <= 50; ++s) EXPECT_GE(gamma(random_convex(6 + s % 10, s)), 1.0);
}

TEST(Asymmetry, GammaTilde) {
  EXPECT_NEAR(gamma_tilde(regular_polygon(6, 1.0)), 1.0, 1e-12);
  const auto t2 = isosceles_T(2.0);
  const auto eq = regular_polygon(3, t2.area());
  EXPECT_NEAR(gamma_tilde(t2), triangle_inradius(eq) / triangle_inradius(t2), 1e-12);
  double prev = 1.0;
  for (double ell : {4.0, 40.0, 400.0}) {
    const double g = gamma_tilde(rectangle_strip(ell));
    EXPECT_GT(g, prev);
    prev = g;
  }
  EXPECT_GT(prev, 9.0);
}

TEST(Checks, StrictAndNonStrictSides) {
  EXPECT_EQ(make_check("a", 0.0, true, 0.5, 1.0, true, 0.01, 10.0).verdict, Verdict::Pass);
  EXPECT_EQ(make_check("a", 0.0, true, 0.05, 1.0, true, 0.01, 10.0).verdict, Verdict::Indeterminate);
  EXPECT_EQ(make_check("a", 0.0, true, -0.5, 1.0, true, 0.01, 10.0).verdict, Verdict::Fail);
  // equality is fine on a non-strict side
  EXPECT_EQ(make_check("a", 0.0, false, 0.0, 1.0, false, 0.0, 10.0).verdict, Verdict::Pass);
  EXPECT_EQ(make_check("a", 0.0, true, 0.0, 1.0, false, 0.0, 10.0).verdict, Verdict::Indeterminate);
  EXPECT_EQ(make_check("a", 0.0, false, 1.05, 1.0, false, 0.01, 10.0).verdict, Verdict::Pass);
  EXPECT_EQ(make_check("a", 0.0, false, 1.2, 1.0, false, 0.01, 10.0).verdict, Verdict::Fail);
  EXPECT_STREQ(to_string(Verdict::Indeterminate), "indeterminate");
}

TEST(Threshold, EquilateralTriangle) {
  const Threshold t = gamma_threshold(3, 2.0);
  EXPECT_NEAR(t.value, std::sqrt(10.0) / 3.0, 1e-3);
  EXPECT_LT(t.abs_error, 1e-3);
  // same formula with the exact torsion of the triangle
  const auto reg = regular_polygon(3, 1.0);
  const double s = std::sqrt(reg.area() / (std::sqrt(3.0) / 4.0));
  const double tau_exact = std::sqrt(3.0) / 320.0 * std::pow(s, 4);
  EXPECT_NEAR(gamma_threshold_from(t.web, tau_exact, 2.0), std::sqrt(10.0) / 3.0, 1e-12);
}

TEST(Threshold, DecagonAndSandwich) {
  EXPECT_NEAR(gamma_threshold(10, 2.0).value, 1.141, 0.005);
  for (int n : {3, 4, 6, 12})
    for (double p : {1.5, 2.0, 3.0}) {
      const double q = conjugate_exponent(p);
      const double g = gamma_threshold(n, p).value;
      EXPECT_GT(g, 1.0) << n << " " << p;
      EXPECT_LT(g, 2.0 / std::pow(q + 1.0, 1.0 / q)) << n << " " << p;
    }
}

TEST(Threshold, TrendsTowardOneForLargeExponents) {
  double prev = gamma_threshold(4, 2.0).value;
  for (double p : {4.0, 8.0}) {
    const double g = gamma_threshold(4, p).value;
    EXPECT_LT(g, prev) << p;
    EXPECT_GT(g, 1.0) << p;
    prev = g;
  }
}

TEST(Threshold, CacheReturnsSameValue) {
  detail::threshold_cache().clear();
  const Threshold a = gamma_threshold(5, 2.0);
  EXPECT_TRUE(detail::threshold_cache().find({5, 2.0, 1e-3}).has_value());
  const Threshold b = gamma_threshold(5, 2.0);
  EXPECT_EQ(a.value, b.value);
  EXPECT_THROW(gamma_threshold(2, 2.0), Error);
}

TEST(EvaluateBounds, SquareIsCircumscribedEquality) {
  const BoundsReport r = evaluate_bounds(kSquare, 2.0);
  EXPECT_NEAR(r.perimeter_functional_web, 0.5, 1e-12);
  EXPECT_NEAR(r.torsion.value, oracle::square_torsion(1.0), 1e-3 * r.torsion.value);
  EXPECT_FALSE(r.any_fail());
  EXPECT_EQ(check(r, "web_perimeter").verdict, Verdict::Pass);
  EXPECT_EQ(r.checks.size(), 6u);
}

TEST(EvaluateBounds, NearDisk) {
  const BoundsReport r = evaluate_bounds(regular_polygon_with_inradius(256, 1.0), 2.0);
  EXPECT_NEAR(r.inradius_functional_torsion, 0.125, 0.005 * 0.125);
  EXPECT_NEAR(r.inradius_functional_web, 0.125, 0.002 * 0.125);
  EXPECT_FALSE(r.any_fail());
  // the lower inradius bounds are attained by disks only; the polygon is within the error bar
  EXPECT_NE(check(r, "torsion_inradius_sharp").verdict, Verdict::Fail);
}

TEST(EvaluateBounds, LongStrip) {
  const BoundsReport r = evaluate_bounds(rectangle_strip(200.0), 2.0);
  EXPECT_NEAR(r.perimeter_functional_torsion, 1.0 / 3.0, 0.02 / 3.0);
  EXPECT_NEAR(r.perimeter_functional_web, 1.0 / 3.0, 0.02 / 3.0);
  EXPECT_FALSE(r.any_fail());
}

TEST(EvaluateBounds, RatioOnRandomPolygons) {
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const auto poly = random_convex(7, s);
    for (double p : {1.5, 3.0}) {
      const BoundsReport r = evaluate_bounds(poly, p);
      EXPECT_EQ(check(r, "ratio").verdict, Verdict::Pass) << s << " " << p;
      EXPECT_FALSE(r.any_fail()) << s << " " << p;
      EXPECT_EQ(r.checks.size(), 5u);
    }
  }
}

TEST(RefinedIsoperimetric, RegularEqualityAndTriangleMargin) {
  const auto reg = regular_polygon(7, 3.0);
  const auto e = refined_isoperimetric_check(reg, 2.0);
  EXPECT_NEAR(e.lhs, e.rhs, 1e-10 * e.rhs);
  EXPECT_TRUE(e.pass);
  const auto t2 = isosceles_T(2.0);
  const auto r = refined_isoperimetric_check(t2, 2.0);
  EXPECT_TRUE(r.pass);
  // every triangle is circumscribed, so both sides coincide
  EXPECT_NEAR(r.lhs, r.rhs, 1e-10 * r.rhs);
  const auto sq = refined_isoperimetric_check(rectangle_strip(3.0), 3.0);
  EXPECT_LT(sq.lhs, sq.rhs);
}

TEST(RefinedIsoperimetric, RandomPolygons) {
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto poly = random_convex(4 + s % 12, s);
    for (double p : {1.2, 2.0, 3.0, 11.0}) EXPECT_TRUE(refined_isoperimetric_check(poly, p).pass) << s << " " << p;
  }
}

TEST(Conjecture, Verdicts) {
  const BoundsConfig cfg;
  const auto t2 = conjecture_verdict(isosceles_T(2.0), 2.0, cfg, true);
  EXPECT_NEAR(t2.gamma, 1.39315, 1e-5);
  EXPECT_TRUE(t2.certified);
  ASSERT_TRUE(t2.fem_comparison.has_value());
  EXPECT_TRUE(t2.fem_comparison->consistent);
  EXPECT_FALSE(conjecture_verdict(isosceles_T(1.1), 2.0, cfg, false).certified);
  const auto reg = conjecture_verdict(regular_polygon(6, 1.0), 2.0, cfg, false);
  EXPECT_FALSE(reg.certified);
  EXPECT_FALSE(reg.fem_comparison.has_value());
}

TEST(TriangleCriterion, RootsMatchGeometry) {
  const auto [lo, hi] = triangle_threshold_roots();
  EXPECT_NEAR(lo, 0.760, 1e-3);
  EXPECT_NEAR(hi, 1.301, 1e-3);
  EXPECT_LT(std::abs(triangle_criterion(lo)), 1e-8);
  EXPECT_LT(std::abs(triangle_criterion(hi)), 1e-8);
  // at the roots the triangle's asymmetry equals sqrt(10)/3
  EXPECT_NEAR(gamma(isosceles_T(lo)), std::sqrt(10.0) / 3.0, 1e-8);
  EXPECT_NEAR(gamma(isosceles_T(hi)), std::sqrt(10.0) / 3.0, 1e-8);
  for (double k : {0.5, 0.7, 1.0, 1.2, 1.4, 3.0})
    EXPECT_EQ(triangle_criterion(k) >= 0.0, gamma(isosceles_T(k)) >= std::sqrt(10.0) / 3.0) << k;
}
