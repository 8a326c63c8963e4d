#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "torsio/error.hpp"
#include "torsio/offset.hpp"
#include "torsio/polygon.hpp"

namespace torsio {

/// SplitMix64 (Steele, Lea, Flood 2014). Output and `split()` are fully
/// specified by the algorithm, so seeded corpora reproduce bit-for-bit across
/// implementations, unlike std:: distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Independent child stream.
  SplitMix64 split() { return SplitMix64(next()); }

 private:
  std::uint64_t state_;
};

/// Regular N-gon of the given area, centroid at the origin, bottom edge
/// horizontal.
inline ConvexPolygon regular_polygon(int n, double target_area) {
  if (n < 3) throw Error(ErrorKind::RangeError, "regular polygon needs N >= 3");
  if (!(target_area > 0.0)) throw Error(ErrorKind::RangeError, "area must be positive");
  const double pi = std::numbers::pi;
  const double circumradius = std::sqrt(2.0 * target_area / (n * std::sin(2.0 * pi / n)));
  std::vector<Vec2> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = -pi / 2.0 - pi / n + 2.0 * pi * i / n;
    v.push_back({circumradius * std::cos(a), circumradius * std::sin(a)});
  }
  return ConvexPolygon::from_ccw_unchecked(std::move(v));
}

/// Regular N-gon with the given inradius.
inline ConvexPolygon regular_polygon_with_inradius(int n, double r) {
  const double area = n * r * r * std::tan(std::numbers::pi / n);
  return regular_polygon(n, area);
}

/// Isosceles triangle T_k with base k and area sqrt(3)/4 (T_1 is equilateral).
inline ConvexPolygon isosceles_T(double k) {
  if (!(k > 0.0)) throw Error(ErrorKind::RangeError, "isosceles triangle needs k > 0");
  const double height = std::sqrt(3.0) / (2.0 * k);
  return ConvexPolygon::from_vertices({{-k / 2.0, 0.0}, {k / 2.0, 0.0}, {0.0, height}});
}

/// (-ell/2, ell/2) x (-1, 1).
inline ConvexPolygon rectangle_strip(double ell) {
  if (!(ell > 0.0)) throw Error(ErrorKind::RangeError, "strip length must be positive");
  return ConvexPolygon::from_vertices(
      {{-ell / 2.0, -1.0}, {ell / 2.0, -1.0}, {ell / 2.0, 1.0}, {-ell / 2.0, 1.0}});
}

/// Relative tolerance on the isoperimetric defect for "circumscribed".
inline constexpr double kCircumscribedTolerance = 1e-9;

inline bool is_circumscribed(const ConvexPolygon& p) {
  return std::abs(isoperimetric_defect(p)) <= kCircumscribedTolerance * p.area();
}

/// Polygonal stadium P^ell: the circumscribed core is cut along the vertical
/// through its incenter and the halves are pushed apart by ell, the gap being
/// filled by the rectangle [-ell/2, ell/2] x (-R, R). The core's first pair of
/// parallel sides is made horizontal first.
inline ConvexPolygon stadium(const ConvexPolygon& core, double ell) {
  if (!(ell >= 0.0)) throw Error(ErrorKind::RangeError, "stadium length must be nonnegative");
  if (!is_circumscribed(core))
    throw Error(ErrorKind::NotCircumscribed, "stadium core must be a circumscribed polygon");
  const auto angle = detail::parallel_axis_angle(core);
  if (!angle) throw Error(ErrorKind::NoParallelSides, "stadium core needs two parallel sides");
  const InscribedDisk disk = chebyshev_disk(core);
  const ConvexPolygon local = core.translated(-disk.center).rotated(*angle);
  if (ell == 0.0) return local;
  std::vector<Vec2> pts;
  for (Vec2 p : detail::clip(local.vertices(), {-1.0, 0.0}, 0.0)) pts.push_back(p - Vec2{ell / 2.0, 0.0});
  for (Vec2 p : detail::clip(local.vertices(), {1.0, 0.0}, 0.0)) pts.push_back(p + Vec2{ell / 2.0, 0.0});
  return ConvexPolygon::from_vertices(pts);
}

/// Polygon whose edges are tangent to the disk of radius r about the origin
/// at the given (strictly increasing) angles.
inline ConvexPolygon circumscribed_polygon(std::span<const double> angles, double r) {
  const double two_pi = 2.0 * std::numbers::pi;
  if (angles.size() < 3) throw Error(ErrorKind::RangeError, "need at least 3 tangent angles");
  if (!(r > 0.0)) throw Error(ErrorKind::RangeError, "radius must be positive");
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!(angles[i] >= 0.0 && angles[i] < two_pi))
      throw Error(ErrorKind::RangeError, "tangent angles must lie in [0, 2pi)");
    if (i > 0 && !(angles[i] > angles[i - 1]))
      throw Error(ErrorKind::RangeError, "tangent angles must be strictly increasing");
  }
  const std::size_t n = angles.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = i + 1 < n ? angles[i + 1] - angles[i] : angles[0] + two_pi - angles[i];
    if (!(gap < std::numbers::pi))
      throw Error(ErrorKind::GapTooWide, "consecutive tangent angles differ by pi or more");
  }
  std::vector<Vec2> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a0 = angles[i], a1 = angles[(i + 1) % n];
    // Tangent lines are {x : u_i . x = r}; inward normal is -u_i.
    const Line l0{{-std::cos(a0), -std::sin(a0)}, -r}, l1{{-std::cos(a1), -std::sin(a1)}, -r};
    Vec2 p;
    intersect(l0, l1, p);
    v.push_back(p);
  }
  return ConvexPolygon::from_vertices(v);
}

inline ConvexPolygon circumscribed_polygon(std::initializer_list<double> angles, double r) {
  return circumscribed_polygon(std::span<const double>(angles.begin(), angles.size()), r);
}

/// Convex hull of n points drawn uniformly from the unit disk.
inline ConvexPolygon random_convex(int n, std::uint64_t seed) {
  if (n < 3) throw Error(ErrorKind::RangeError, "random polygon needs n >= 3");
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double rad = std::sqrt(rng.uniform());
      const double th = 2.0 * std::numbers::pi * rng.uniform();
      pts.push_back({rad * std::cos(th), rad * std::sin(th)});
    }
    const double diag = detail::bbox_diag(pts);
    std::vector<Vec2> hull = detail::convex_hull(pts, kConvexityTolerance * diag * diag);
    if (hull.size() >= 3 && detail::signed_area(hull) > 1e-6) return ConvexPolygon::from_vertices(hull);
  }
  throw Error(ErrorKind::Degenerate, "could not draw a nondegenerate hull");
}

/// Random circumscribed polygon: n sorted tangent angles with gaps < pi.
inline ConvexPolygon random_circumscribed(int n, std::uint64_t seed, double r = 1.0) {
  if (n < 3) throw Error(ErrorKind::RangeError, "circumscribed polygon needs n >= 3");
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> a;
    for (int i = 0; i < n; ++i) a.push_back(2.0 * std::numbers::pi * rng.uniform());
    std::sort(a.begin(), a.end());
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const double gap = i + 1 < n ? a[i + 1] - a[i] : a[0] + 2.0 * std::numbers::pi - a[i];
      ok = gap > 1e-3 && gap < std::numbers::pi - 1e-3;
    }
    if (ok) return circumscribed_polygon(a, r);
  }
  throw Error(ErrorKind::Degenerate, "could not draw valid tangent angles");
}

}  // namespace torsio
