#pragma once

#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "torsio/error.hpp"

namespace torsio {

struct QuadratureConfig {
  int nodes_per_piece = 32;     // Gauss-Legendre order per panel
  int refinement_limit = 4000;  // maximum number of panel bisections
  double rel_tol = 1e-12;

  void validate() const {
    if (nodes_per_piece < 8) throw Error(ErrorKind::InvalidArgument, "nodes_per_piece must be >= 8");
    if (!(rel_tol >= 1e-14)) throw Error(ErrorKind::InvalidArgument, "rel_tol must be >= 1e-14");
    if (refinement_limit < 0) throw Error(ErrorKind::InvalidArgument, "refinement_limit must be >= 0");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int bisections = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  template <class F>
  double apply(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(mid + half * nodes[i]);
    return s * half;
  }
};

/// Globally adaptive Gauss-Legendre: the panel with the largest
/// coarse-vs-bisected discrepancy is split until the summed discrepancy drops
/// below rel_tol * |value|. Throws NonConvergent past refinement_limit.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  cfg.validate();
  if (!(b > a)) return {};
  const GaussLegendre rule(cfg.nodes_per_piece);

  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto make = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double whole = rule.apply(f, lo, hi);
    const double halves = rule.apply(f, lo, mid) + rule.apply(f, mid, hi);
    return Panel{lo, hi, halves, std::abs(whole - halves)};
  };

  std::priority_queue<Panel> panels;
  panels.push(make(a, b));
  double value = panels.top().value, error = panels.top().error;
  int bisections = 0;
  // Floor for integrands that vanish identically.
  const double abs_floor = 1e-300;
  while (error > cfg.rel_tol * std::abs(value) && error > abs_floor) {
    if (bisections >= cfg.refinement_limit)
      throw Error(ErrorKind::NonConvergent, "adaptive quadrature hit its refinement limit");
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = make(worst.a, mid), right = make(mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++bisections;
  }
  // Re-sum to shed the drift of the incremental updates.
  double total = 0.0, total_err = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    total_err += panels.top().error;
    panels.pop();
  }
  return {total, total_err, bisections};
}

}  // namespace torsio
