#pragma once

#include <cmath>

namespace torsio {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Counterclockwise quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Oriented line `{x : normal . x == offset}` with unit `normal`; the
/// half-plane `normal . x >= offset` is "inside".
struct Line {
  Vec2 normal;
  double offset = 0.0;

  double signed_distance(Vec2 p) const { return dot(normal, p) - offset; }
  Line shifted(double t) const { return {normal, offset + t}; }
};

/// Intersection of two non-parallel lines; returns false if |det| is tiny.
inline bool intersect(const Line& a, const Line& b, Vec2& out) {
  const double det = cross(a.normal, b.normal);
  if (std::abs(det) < 1e-300) return false;
  out = {(a.offset * b.normal.y - b.offset * a.normal.y) / det,
         (a.normal.x * b.offset - b.normal.x * a.offset) / det};
  return true;
}

}  // namespace torsio
