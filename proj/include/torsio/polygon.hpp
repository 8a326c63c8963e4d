#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "torsio/error.hpp"
#include "torsio/vec2.hpp"

namespace torsio {

/// Relative tolerance for cross products, scaled by the squared bounding-box
/// diagonal of the input.
inline constexpr double kConvexityTolerance = 1e-12;

/// Bounded, strictly convex polygon with counterclockwise vertices.
///
/// Instances are immutable. Use `from_vertices` for untrusted input; it
/// normalizes orientation, merges repeated and collinear vertices, and rejects
/// point sets that are not in convex position.
class ConvexPolygon {
 public:
  static ConvexPolygon from_vertices(std::span<const Vec2> points);
  static ConvexPolygon from_vertices(std::initializer_list<Vec2> points) {
    return from_vertices(std::span<const Vec2>(points.begin(), points.size()));
  }

  /// Wraps vertices already known to be counterclockwise and strictly convex
  /// (as produced by the offset engine). Only cheap sanity checks run here.
  static ConvexPolygon from_ccw_unchecked(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  Vec2 edge(std::size_t i) const { return vertex(i + 1) - vertex(i); }

  /// Supporting line of edge i (from vertex i to i+1), normal pointing inward.
  Line edge_line(std::size_t i) const {
    const Vec2 d = edge(i);
    const Vec2 n = perp(d) / norm(d);
    return {n, dot(n, vertex(i))};
  }

  double area() const;
  double perimeter() const;
  /// Sum over vertices of cot(theta_i / 2), theta_i the interior angles.
  double cotangent_sum() const;
  std::vector<double> interior_angles() const;
  Vec2 centroid() const;
  double bbox_diagonal() const;
  double diameter() const;

  ConvexPolygon translated(Vec2 shift) const;
  ConvexPolygon scaled(double factor) const;
  ConvexPolygon rotated(double angle) const;

 private:
  explicit ConvexPolygon(std::vector<Vec2> v) : vertices_(std::move(v)) {}
  std::vector<Vec2> vertices_;
};

inline double area(const ConvexPolygon& p) { return p.area(); }
inline double perimeter(const ConvexPolygon& p) { return p.perimeter(); }
inline double cotangent_sum(const ConvexPolygon& p) { return p.cotangent_sum(); }

/// |dP|^2 / (4 C) - |P|; nonnegative, zero exactly for circumscribed polygons.
inline double isoperimetric_defect(const ConvexPolygon& p) {
  const double l = p.perimeter();
  return l * l / (4.0 * p.cotangent_sum()) - p.area();
}

// ---------------------------------------------------------------------------

namespace detail {

inline double bbox_diag(std::span<const Vec2> pts) {
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Vec2& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return std::hypot(xmax - xmin, ymax - ymin);
}

inline double signed_area(std::span<const Vec2> v) {
  double s = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) s += cross(v[i], v[(i + 1) % n]);
  return 0.5 * s;
}

/// Andrew's monotone chain; drops points within `tol` (cross product) of a
/// hull edge. Returns counterclockwise hull.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts, double tol) {
  std::sort(pts.begin(), pts.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= tol) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    const Vec2& p = pts[i];
    while (k >= t && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= tol) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace detail

inline ConvexPolygon ConvexPolygon::from_vertices(std::span<const Vec2> points) {
  if (points.size() < 3)
    throw Error(ErrorKind::Degenerate, "a polygon needs at least 3 vertices");
  for (const Vec2& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorKind::InvalidArgument, "non-finite vertex coordinate");

  const double diag = detail::bbox_diag(points);
  const double tol = kConvexityTolerance * diag * diag;
  if (!(diag > 0.0)) throw Error(ErrorKind::Degenerate, "all vertices coincide");

  std::vector<Vec2> hull = detail::convex_hull({points.begin(), points.end()}, tol);
  if (hull.size() < 3) throw Error(ErrorKind::Degenerate, "vertices are collinear");

  // Every input point must lie on the hull boundary; an interior point is a
  // reflex vertex of the input polygon.
  for (const Vec2& p : points) {
    bool inside = true;
    for (std::size_t i = 0; i < hull.size() && inside; ++i) {
      const Vec2 a = hull[i], b = hull[(i + 1) % hull.size()];
      if (cross(b - a, p - a) <= tol) inside = false;
    }
    if (inside)
      throw Error(ErrorKind::NotConvex, "vertex (" + std::to_string(p.x) + ", " +
                                            std::to_string(p.y) + ") is reflex");
  }

  if (detail::signed_area(hull) <= tol)
    throw Error(ErrorKind::Degenerate, "polygon area below tolerance");

  // Keep the caller's starting vertex when it survives normalization.
  for (const Vec2& p : points) {
    auto it = std::find(hull.begin(), hull.end(), p);
    if (it != hull.end()) {
      std::rotate(hull.begin(), it, hull.end());
      break;
    }
  }
  return ConvexPolygon(std::move(hull));
}

inline ConvexPolygon ConvexPolygon::from_ccw_unchecked(std::vector<Vec2> vertices) {
  if (vertices.size() < 3)
    throw Error(ErrorKind::Degenerate, "a polygon needs at least 3 vertices");
  if (!(detail::signed_area(vertices) > 0.0))
    throw Error(ErrorKind::Degenerate, "vertices are not counterclockwise");
  return ConvexPolygon(std::move(vertices));
}

inline double ConvexPolygon::area() const { return detail::signed_area(vertices_); }

inline double ConvexPolygon::perimeter() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += norm(edge(i));
  return s;
}

inline double ConvexPolygon::cotangent_sum() const {
  // cot(theta/2) = tan(phi/2) with phi = pi - theta the turning angle;
  // tan(phi/2) = sin(phi) / (1 + cos(phi)) avoids any trig call.
  double s = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = edge(i + n - 1), b = edge(i);
    const double ab = norm(a) * norm(b), c = dot(a, b), sn = cross(a, b);
    s += c >= 0.0 ? sn / (ab + c) : (ab - c) / sn;
  }
  return s;
}

inline std::vector<double> ConvexPolygon::interior_angles() const {
  std::vector<double> out;
  const std::size_t n = size();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = edge(i + n - 1), b = edge(i);
    out.push_back(std::numbers::pi - std::atan2(cross(a, b), dot(a, b)));
  }
  return out;
}

inline Vec2 ConvexPolygon::centroid() const {
  Vec2 c{};
  double a2 = 0.0;
  const Vec2 o = vertices_[0];
  for (std::size_t i = 1; i + 1 < size(); ++i) {
    const Vec2 p = vertices_[i] - o, q = vertices_[i + 1] - o;
    const double w = cross(p, q);
    c += (p + q) * w;
    a2 += w;
  }
  return o + c / (3.0 * a2);
}

inline double ConvexPolygon::bbox_diagonal() const { return detail::bbox_diag(vertices_); }

inline double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j) d = std::max(d, distance(vertices_[i], vertices_[j]));
  return d;
}

inline ConvexPolygon ConvexPolygon::translated(Vec2 shift) const {
  std::vector<Vec2> v = vertices_;
  for (Vec2& p : v) p += shift;
  return ConvexPolygon(std::move(v));
}

inline ConvexPolygon ConvexPolygon::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  std::vector<Vec2> v = vertices_;
  for (Vec2& p : v) p = p * factor;
  return ConvexPolygon(std::move(v));
}

inline ConvexPolygon ConvexPolygon::rotated(double angle) const {
  std::vector<Vec2> v = vertices_;
  for (Vec2& p : v) p = rotate(p, angle);
  return ConvexPolygon(std::move(v));
}

}  // namespace torsio
