#pragma once

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "torsio/vec2.hpp"

namespace torsio::detail {

// Orientation and in-circle tests with a floating-point filter (Shewchuk's
// stage-A error bounds) and an exact rational fallback.

using Exact = boost::multiprecision::cpp_rational;

inline constexpr double kEpsilon = 0x1.0p-53;
inline constexpr double kOrientBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;
inline constexpr double kInCircleBound = (10.0 + 96.0 * kEpsilon) * kEpsilon;

inline int sign_of(const Exact& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

/// +1 if a, b, c turn counterclockwise, -1 clockwise, 0 collinear.
inline int orient2d(Vec2 a, Vec2 b, Vec2 c) {
  const double l = (a.x - c.x) * (b.y - c.y);
  const double r = (a.y - c.y) * (b.x - c.x);
  const double det = l - r;
  const double bound = kOrientBound * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  const Exact ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  return sign_of((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

/// +1 if d lies strictly inside the circle through the counterclockwise
/// triangle a, b, c; -1 outside; 0 on it.
inline int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double bc = bdx * cdy - cdx * bdy, ca = cdx * ady - adx * cdy, ab = adx * bdy - bdx * ady;
  const double al = adx * adx + ady * ady, bl = bdx * bdx + bdy * bdy, cl = cdx * cdx + cdy * cdy;
  const double det = al * bc + bl * ca + cl * ab;
  const double perm = (std::abs(bdx * cdy) + std::abs(cdx * bdy)) * al +
                      (std::abs(cdx * ady) + std::abs(adx * cdy)) * bl +
                      (std::abs(adx * bdy) + std::abs(bdx * ady)) * cl;
  const double bound = kInCircleBound * perm;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  const Exact eadx = Exact(a.x) - Exact(d.x), eady = Exact(a.y) - Exact(d.y);
  const Exact ebdx = Exact(b.x) - Exact(d.x), ebdy = Exact(b.y) - Exact(d.y);
  const Exact ecdx = Exact(c.x) - Exact(d.x), ecdy = Exact(c.y) - Exact(d.y);
  const Exact e = (eadx * eadx + eady * eady) * (ebdx * ecdy - ecdx * ebdy) +
                  (ebdx * ebdx + ebdy * ebdy) * (ecdx * eady - eadx * ecdy) +
                  (ecdx * ecdx + ecdy * ecdy) * (eadx * ebdy - ebdx * eady);
  return sign_of(e);
}

inline Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ba = b - a, ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  const double b2 = norm2(ba), c2 = norm2(ca);
  return a + Vec2{(ca.y * b2 - ba.y * c2) / d, (ba.x * c2 - ca.x * b2) / d};
}

}  // namespace torsio::detail
