#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "torsio/chebyshev.hpp"
#include "torsio/error.hpp"
#include "torsio/polygon.hpp"

namespace torsio {

/// One interval of the offset flow on which the vertex count is constant and
/// the Steiner formulae hold with fixed coefficients:
///   |P_t|  = area - perimeter*s + cot_sum*s^2
///   |dP_t| = perimeter - 2*cot_sum*s,          s = t - t_start.
struct SteinerPiece {
  double t_start = 0.0;
  double t_end = 0.0;
  ConvexPolygon polygon;     // the inner parallel set at t_start
  std::vector<Line> lines;   // active edge lines, unshifted (t = 0 frame)
  double area = 0.0;
  double perimeter = 0.0;
  double cot_sum = 0.0;

  double area_at(double t) const {
    const double s = t - t_start;
    return area - perimeter * s + cot_sum * s * s;
  }
  double perimeter_at(double t) const { return perimeter - 2.0 * cot_sum * (t - t_start); }

  /// (A, -L, C): coefficients of |P_t| in powers of (t - t_start).
  std::array<double, 3> area_coeffs() const { return {area, -perimeter, cot_sum}; }
  /// (L, -2C): coefficients of |dP_t| in powers of (t - t_start).
  std::array<double, 2> perimeter_coeffs() const { return {perimeter, -2.0 * cot_sum}; }
};

struct Extinction {
  enum class Kind { Point, Segment };
  Kind kind = Kind::Point;
  double length = 0.0;  // segment length, 0 for a point
  Vec2 a;               // segment endpoints (a == b for a point)
  Vec2 b;
};

/// Event decomposition of t -> Omega_t on [0, R).
struct OffsetTrace {
  std::vector<SteinerPiece> pieces;
  double r_first = 0.0;   // first time the vertex count drops (== inradius for stadiums)
  double inradius = 0.0;  // extinction time
  Extinction extinction;

  /// Index of the piece owning t; pieces own their left endpoint.
  std::size_t piece_index(double t) const {
    std::size_t i = 0;
    while (i + 1 < pieces.size() && t >= pieces[i + 1].t_start) ++i;
    return i;
  }
  double area_at(double t) const {
    if (t >= inradius) return 0.0;
    return std::max(0.0, pieces[piece_index(t)].area_at(t));
  }
  double perimeter_at(double t) const {
    if (t >= inradius) return 0.0;
    return std::max(0.0, pieces[piece_index(t)].perimeter_at(t));
  }
  double cot_sum_at(double t) const { return pieces[piece_index(std::min(t, inradius))].cot_sum; }
  bool is_stadium() const { return pieces.size() == 1; }
};

namespace detail {

/// cot(theta/2) at the vertex where the boundary turns from normal n0 to n1.
inline double half_cot(Vec2 n0, Vec2 n1) {
  const double s = cross(n0, n1), c = dot(n0, n1);
  // tan(phi/2) = s / (1 + c) = (1 - c) / s; the second form is exact-ish at
  // sharp vertices where c -> -1.
  return c >= 0.0 ? s / (1.0 + c) : (1.0 - c) / s;
}

/// Velocity of the vertex joining lines with normals n0, n1 as both shift
/// inward at unit speed.
inline Vec2 vertex_velocity(Vec2 n0, Vec2 n1) {
  const Line a{n0, 1.0}, b{n1, 1.0};
  Vec2 w;
  intersect(a, b, w);
  return w;
}

inline std::vector<Vec2> polygon_from_lines(const std::vector<Line>& lines, double t) {
  const std::size_t m = lines.size();
  std::vector<Vec2> v(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (!intersect(lines[(j + m - 1) % m].shifted(t), lines[j].shifted(t), v[j]))
      throw Error(ErrorKind::NumericalCollapse, "adjacent offset edges are parallel");
  }
  return v;
}

}  // namespace detail

/// Event-driven shrinking of the polygon. Within a piece each edge loses
/// length at rate cot(theta_l/2) + cot(theta_r/2); the earliest collapse ends
/// the piece, collapsed edges are dropped and the polygon is rebuilt from the
/// remaining edge lines. An edge whose remaining length at the event time is
/// below 1e-9 * |dOmega| collapses in the same event.
inline OffsetTrace offset_trace(const ConvexPolygon& poly) {
  const double length_tol = 1e-9 * poly.perimeter();
  const double diag = poly.bbox_diagonal();

  std::vector<Line> lines;
  for (std::size_t i = 0; i < poly.size(); ++i) lines.push_back(poly.edge_line(i));

  OffsetTrace trace;
  double t = 0.0;
  std::optional<ConvexPolygon> current = poly;

  for (std::size_t guard = 0; guard <= poly.size() + 1; ++guard) {
    const std::size_t m = lines.size();
    std::vector<Vec2> verts = current ? current->vertices() : detail::polygon_from_lines(lines, t);
    if (!current) {
      if (detail::signed_area(verts) <= 0.0)
        throw Error(ErrorKind::NumericalCollapse, "rebuilt offset polygon is not counterclockwise");
      for (std::size_t j = 0; j < m; ++j)
        if (cross(verts[j] - verts[(j + m - 1) % m], verts[(j + 1) % m] - verts[j]) <= 0.0)
          throw Error(ErrorKind::NumericalCollapse, "rebuilt offset polygon is not convex");
      current = ConvexPolygon::from_ccw_unchecked(verts);
    }

    // k[j]: cot of half the interior angle at vertex j (between edge j-1 and j).
    std::vector<double> k(m);
    double csum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      k[j] = detail::half_cot(lines[(j + m - 1) % m].normal, lines[j].normal);
      csum += k[j];
    }
    std::vector<double> collapse(m);
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double len = distance(verts[j], verts[(j + 1) % m]);
      collapse[j] = len / (k[j] + k[(j + 1) % m]);
      delta = std::min(delta, collapse[j]);
    }

    SteinerPiece piece{t, t + delta, *current, lines, current->area(), current->perimeter(), csum};
    trace.pieces.push_back(piece);
    if (trace.pieces.size() == 1) trace.r_first = delta;

    std::vector<Line> survivors;
    std::vector<std::size_t> survivor_index;
    for (std::size_t j = 0; j < m; ++j)
      if ((collapse[j] - delta) * (k[j] + k[(j + 1) % m]) > length_tol) {
        survivors.push_back(lines[j]);
        survivor_index.push_back(j);
      }

    bool extinct = survivors.size() < 3;
    if (!extinct) {
      const std::vector<Vec2> next = detail::polygon_from_lines(survivors, t + delta);
      extinct = detail::signed_area(next) <= 1e-14 * diag * diag;
    }

    if (extinct) {
      trace.inradius = t + delta;
      const double remaining = piece.perimeter_at(t + delta);
      // Vertices at extinction, by moving each along its bisector.
      std::vector<Vec2> finals(m);
      for (std::size_t j = 0; j < m; ++j)
        finals[j] = verts[j] + detail::vertex_velocity(lines[(j + m - 1) % m].normal, lines[j].normal) * delta;
      Extinction ext;
      if (remaining > 2.0 * length_tol && survivors.size() == 2) {
        const Vec2 axis = perp(survivors[0].normal);
        auto [lo, hi] = std::minmax_element(finals.begin(), finals.end(),
                                            [&](Vec2 p, Vec2 q) { return dot(p, axis) < dot(q, axis); });
        ext.kind = Extinction::Kind::Segment;
        ext.a = *lo;
        ext.b = *hi;
        ext.length = 0.5 * remaining;
      } else {
        Vec2 c{};
        for (const Vec2& p : finals) c += p;
        c = c / static_cast<double>(m);
        ext.kind = Extinction::Kind::Point;
        ext.a = ext.b = c;
        ext.length = 0.0;
      }
      trace.extinction = ext;
      return trace;
    }

    lines = std::move(survivors);
    t += delta;
    current.reset();
  }
  throw Error(ErrorKind::NumericalCollapse, "offset trace did not terminate");
}

/// Inner parallel set {x : dist(x, dOmega) > t}; nullopt once t >= R.
inline std::optional<ConvexPolygon> offset_at(const OffsetTrace& trace, double t) {
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "offset distance must be nonnegative");
  if (t >= trace.inradius) return std::nullopt;
  const SteinerPiece& piece = trace.pieces[trace.piece_index(t)];
  if (t == piece.t_start) return piece.polygon;
  std::vector<Vec2> v = detail::polygon_from_lines(piece.lines, t);
  if (!(detail::signed_area(v) > 0.0)) return std::nullopt;
  return ConvexPolygon::from_ccw_unchecked(std::move(v));
}

inline std::optional<ConvexPolygon> offset_at(const ConvexPolygon& poly, double t) {
  return offset_at(offset_trace(poly), t);
}

/// Relative tolerance for the trace / linear-program inradius agreement.
inline constexpr double kInradiusOracleTolerance = 1e-8;

/// Inradius as the extinction time of the offset flow, cross-checked against
/// the Chebyshev-center linear program.
inline double inradius(const ConvexPolygon& poly, const OffsetTrace& trace) {
  const InscribedDisk disk = chebyshev_disk(poly);
  if (std::abs(disk.radius - trace.inradius) > kInradiusOracleTolerance * trace.inradius)
    throw Error(ErrorKind::OracleMismatch,
                "offset extinction time and inscribed-disk program disagree");
  return trace.inradius;
}

inline double inradius(const ConvexPolygon& poly) { return inradius(poly, offset_trace(poly)); }

// ---------------------------------------------------------------------------

/// A polygonal stadium written as a circumscribed core P and a length ell.
/// `core` is expressed with its incenter at the origin and, when ell > 0, the
/// long axis along x.
struct StadiumDecomposition {
  ConvexPolygon core;
  double ell = 0.0;
  double inradius = 0.0;
};

namespace detail {

/// Sutherland-Hodgman clip of a convex polygon against `n . x >= c`.
inline std::vector<Vec2> clip(const std::vector<Vec2>& poly, Vec2 n, double c) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % m];
    const double dp = dot(n, p) - c, dq = dot(n, q) - c;
    if (dp >= 0.0) out.push_back(p);
    if ((dp >= 0.0) != (dq >= 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
  }
  return out;
}

/// Rotation angle that makes the first pair of antiparallel edges horizontal;
/// nullopt when no such pair exists.
inline std::optional<double> parallel_axis_angle(const ConvexPolygon& poly, double tol = 1e-9) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 ni = poly.edge_line(i).normal;
    for (std::size_t j = i + 1; j < poly.size(); ++j) {
      const Vec2 nj = poly.edge_line(j).normal;
      if (dot(ni, nj) < -1.0 + tol) {
        const Vec2 d = poly.edge(i);
        return -std::atan2(d.y, d.x);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Splits a stadium P^ell into its circumscribed core and length; throws
/// NotStadium when the vertex count changes before extinction.
inline StadiumDecomposition stadium_decompose(const ConvexPolygon& poly, const OffsetTrace& trace) {
  if (!trace.is_stadium())
    throw Error(ErrorKind::NotStadium, "vertex count drops at t = " + std::to_string(trace.r_first) +
                                           " before the inradius " + std::to_string(trace.inradius));
  const double r = trace.inradius;
  const Extinction& ext = trace.extinction;
  if (ext.kind == Extinction::Kind::Point) {
    ConvexPolygon core = poly.translated(-ext.a);
    if (auto angle = detail::parallel_axis_angle(core)) core = core.rotated(*angle);
    return {core, 0.0, r};
  }
  const Vec2 axis = (ext.b - ext.a) / norm(ext.b - ext.a);
  const double angle = -std::atan2(axis.y, axis.x);
  const ConvexPolygon local = poly.translated(-(ext.a + ext.b) * 0.5).rotated(angle);
  const double half = 0.5 * ext.length;
  std::vector<Vec2> left = detail::clip(local.vertices(), {-1.0, 0.0}, half);
  std::vector<Vec2> right = detail::clip(local.vertices(), {1.0, 0.0}, half);
  std::vector<Vec2> pts;
  for (Vec2 p : left) pts.push_back(p + Vec2{half, 0.0});
  for (Vec2 p : right) pts.push_back(p - Vec2{half, 0.0});
  return {ConvexPolygon::from_vertices(pts), ext.length, r};
}

inline StadiumDecomposition stadium_decompose(const ConvexPolygon& poly) {
  return stadium_decompose(poly, offset_trace(poly));
}

}  // namespace torsio
