#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "torsio/error.hpp"
#include "torsio/polygon.hpp"

namespace torsio {

struct InscribedDisk {
  Vec2 center;
  double radius = 0.0;
};

namespace detail {

/// Dense tableau simplex for `max c.z  s.t.  A z <= b, z >= 0` with b >= 0,
/// so the slack basis is feasible from the start. Bland's rule.
inline std::vector<double> simplex_max(const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& b,
                                       const std::vector<double>& c) {
  const std::size_t m = a.size(), n = c.size();
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  constexpr double eps = 1e-13;
  for (std::size_t iter = 0; iter < 50 * (m + n) + 100; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j)
      if (t[m][j] < -eps) { enter = j; break; }
    if (enter == cols) {
      std::vector<double> z(n, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) z[basis[i]] = t[i][cols - 1];
      return z;
    }
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps) {
        const double ratio = t[i][cols - 1] / t[i][enter];
        if (ratio < best - 1e-15 || (ratio <= best + 1e-15 && leave < m && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) throw Error(ErrorKind::NumericalCollapse, "inscribed-disk program is unbounded");
    const double piv = t[leave][enter];
    for (double& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  throw Error(ErrorKind::NonConvergent, "simplex iteration limit reached");
}

}  // namespace detail

/// Largest inscribed disk (Chebyshev center) from the linear program
/// `max r  s.t.  n_i . x - c_i >= r` over the edge half-planes.
inline InscribedDisk chebyshev_disk(const ConvexPolygon& poly) {
  const Vec2 x0 = poly.centroid();
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Line l = poly.edge_line(i);
    const Vec2 n = l.normal;
    a.push_back({-n.x, n.x, -n.y, n.y, 1.0});
    b.push_back(std::max(0.0, l.signed_distance(x0)));
  }
  const std::vector<double> z = detail::simplex_max(a, b, {0.0, 0.0, 0.0, 0.0, 1.0});
  return {x0 + Vec2{z[0] - z[1], z[2] - z[3]}, z[4]};
}

}  // namespace torsio
