#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "torsio/error.hpp"
#include "torsio/offset.hpp"
#include "torsio/plaplace.hpp"
#include "torsio/polygon.hpp"
#include "torsio/shapes.hpp"
#include "torsio/web_torsion.hpp"

namespace torsio {

struct BoundsConfig {
  /// Target relative error for FEM torsion values.
  double accuracy = 1e-3;
  /// Strict inequalities are decided only outside this many error bounds.
  double exclusion_factor = 10.0;
  /// Relative error assigned to quantities computed exactly up to rounding.
  double exact_rel_error = 1e-12;
  TorsionOptions fem;
  QuadratureConfig quadrature;
};

/// Perimeter of the regular N-gon with the given area.
inline double regular_perimeter(int n, double area) {
  return std::sqrt(4.0 * n * area * std::tan(std::numbers::pi / n));
}

/// Inradius of the regular N-gon with the given area.
inline double regular_inradius(int n, double area) {
  return std::sqrt(area / (n * std::tan(std::numbers::pi / n)));
}

/// Perimeter of the polygon over that of the regular polygon with the same
/// area and vertex count.
inline double gamma(const ConvexPolygon& poly) {
  return poly.perimeter() / regular_perimeter(static_cast<int>(poly.size()), poly.area());
}

/// Inradius of the matched regular polygon over the inradius of the polygon.
inline double gamma_tilde(const ConvexPolygon& poly) {
  return regular_inradius(static_cast<int>(poly.size()), poly.area()) / inradius(poly);
}

/// Gamma_{N,p} from the web torsion and torsion of the regular N-gon.
inline double gamma_threshold_from(double web, double tau, double q) {
  return std::pow(web / tau, 1.0 / q) * 2.0 / std::pow(q + 1.0, 1.0 / q);
}

struct Threshold {
  int n = 0;
  double p = 2.0;
  double value = 0.0;
  double abs_error = 0.0;
  double web = 0.0;       // of the regular N-gon with unit area
  TorsionEstimate tau;    // same polygon, FEM
};

namespace detail {

class ThresholdCache {
 public:
  using Key = std::tuple<int, double, double>;
  std::optional<Threshold> find(const Key& k) const {
    std::shared_lock lock(mutex_);
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void store(const Key& k, const Threshold& t) {
    std::unique_lock lock(mutex_);
    map_.emplace(k, t);
  }
  void clear() {
    std::unique_lock lock(mutex_);
    map_.clear();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<Key, Threshold> map_;
};

inline ThresholdCache& threshold_cache() {
  static ThresholdCache cache;
  return cache;
}

}  // namespace detail

/// Gamma_{N,p}; the regular polygon's web torsion is closed-form, its torsion
/// comes from FEM at `cfg.accuracy`. Results are cached per (N, p, accuracy).
inline Threshold gamma_threshold(int n, double p, const BoundsConfig& cfg = {}) {
  if (n < 3) throw Error(ErrorKind::RangeError, "N must be at least 3");
  const double q = conjugate_exponent(p);
  const detail::ThresholdCache::Key key{n, p, cfg.accuracy};
  if (auto hit = detail::threshold_cache().find(key)) return *hit;
  const ConvexPolygon reg = regular_polygon(n, 1.0);
  Threshold t;
  t.n = n;
  t.p = p;
  t.web = web_torsion_circumscribed(reg.area(), reg.perimeter(), q);
  t.tau = torsion(reg, p, cfg.accuracy, cfg.fem);
  t.value = gamma_threshold_from(t.web, t.tau.value, q);
  t.abs_error = t.value / q * t.tau.rel_error();
  detail::threshold_cache().store(key, t);
  return t;
}

enum class Verdict { Pass, Fail, Indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

struct BoundCheck {
  std::string name;
  double bound_low = 0.0;
  double bound_high = 0.0;
  bool low_strict = false;
  bool high_strict = false;
  double value = 0.0;
  double abs_error = 0.0;
  Verdict verdict = Verdict::Pass;

  bool pass() const { return verdict == Verdict::Pass; }
};

/// Decides low (<|<=) value (<|<=) high given an error bar. Strict sides need
/// clearance of `factor` error bars; non-strict sides only fail when violated
/// by more than that.
inline BoundCheck make_check(std::string name, double low, bool low_strict, double value, double high,
                             bool high_strict, double abs_error, double factor) {
  BoundCheck c{std::move(name), low, high, low_strict, high_strict, value, abs_error, Verdict::Pass};
  const double margin = factor * abs_error;
  auto side = [&](double gap, bool strict) {
    // gap > 0 means the inequality holds
    if (gap < -margin) return Verdict::Fail;
    if (strict && gap <= margin) return Verdict::Indeterminate;
    return Verdict::Pass;
  };
  const Verdict lo = side(value - low, low_strict), hi = side(high - value, high_strict);
  if (lo == Verdict::Fail || hi == Verdict::Fail)
    c.verdict = Verdict::Fail;
  else if (lo == Verdict::Indeterminate || hi == Verdict::Indeterminate)
    c.verdict = Verdict::Indeterminate;
  return c;
}

struct BoundsReport {
  double p = 2.0;
  double q = 2.0;
  double area = 0.0;
  double perimeter = 0.0;
  double inradius = 0.0;
  TorsionEstimate web;
  TorsionEstimate torsion;
  double perimeter_functional_web = 0.0;
  double perimeter_functional_torsion = 0.0;
  double inradius_functional_web = 0.0;
  double inradius_functional_torsion = 0.0;
  double ratio = 0.0;
  std::vector<BoundCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
  bool any_fail() const {
    for (const auto& c : checks)
      if (c.verdict == Verdict::Fail) return true;
    return false;
  }
};

/// Builds the report from already computed web torsion and torsion.
inline BoundsReport bounds_report(const ConvexPolygon& poly, const TorsionEstimate& web,
                                  const TorsionEstimate& tau, const BoundsConfig& cfg = {}) {
  BoundsReport r;
  r.p = web.p;
  r.q = web.q;
  const double q = r.q;
  r.area = poly.area();
  r.perimeter = poly.perimeter();
  r.inradius = inradius(poly);
  r.web = web;
  r.torsion = tau;
  const double per = std::pow(r.perimeter, q) / std::pow(r.area, q + 1.0);
  const double inr = 1.0 / (std::pow(r.inradius, q) * r.area);
  r.perimeter_functional_web = web.value * per;
  r.perimeter_functional_torsion = tau.value * per;
  r.inradius_functional_web = web.value * inr;
  r.inradius_functional_torsion = tau.value * inr;
  r.ratio = web.value / tau.value;

  const double ew = std::max(web.rel_error(), cfg.exact_rel_error);
  const double et = std::max(tau.rel_error(), cfg.exact_rel_error);
  const double f = cfg.exclusion_factor;
  const double disk = 1.0 / ((q + 2.0) * std::pow(2.0, q - 1.0));
  auto& c = r.checks;
  c.push_back(make_check("torsion_perimeter", 1.0 / (q + 1.0), true, r.perimeter_functional_torsion,
                         std::pow(2.0, q + 1.0) / ((q + 2.0) * (q + 1.0)), true,
                         et * r.perimeter_functional_torsion, f));
  c.push_back(make_check("web_perimeter", 1.0 / (q + 1.0), true, r.perimeter_functional_web, 2.0 / (q + 2.0),
                         false, ew * r.perimeter_functional_web, f));
  c.push_back(make_check("torsion_inradius", disk, false, r.inradius_functional_torsion,
                         std::pow(2.0, q) / ((q + 1.0) * (q + 1.0)), true, et * r.inradius_functional_torsion, f));
  c.push_back(make_check("web_inradius", disk, false, r.inradius_functional_web, 1.0 / (q + 1.0), true,
                         ew * r.inradius_functional_web, f));
  c.push_back(make_check("ratio", (q + 1.0) / std::pow(2.0, q), true, r.ratio, 1.0, false, (ew + et) * r.ratio, f));
  if (r.p == 2.0)
    c.push_back(make_check("torsion_inradius_sharp", 1.0 / 8.0, false, r.inradius_functional_torsion, 1.0 / 3.0,
                           false, et * r.inradius_functional_torsion, f));
  return r;
}

inline BoundsReport evaluate_bounds(const ConvexPolygon& poly, double p, const BoundsConfig& cfg = {}) {
  const TorsionEstimate web = web_torsion(poly, p, cfg.quadrature);
  const TorsionEstimate tau = torsion(poly, p, cfg.accuracy, cfg.fem);
  return bounds_report(poly, web, tau, cfg);
}

struct RefinedIsoperimetric {
  double lhs = 0.0;  // w_p of the polygon
  double rhs = 0.0;  // gamma^-q w_p of the matched regular polygon
  bool pass = false;
};

inline RefinedIsoperimetric refined_isoperimetric_check(const ConvexPolygon& poly, double p,
                                                        const BoundsConfig& cfg = {}) {
  const double q = conjugate_exponent(p);
  const int n = static_cast<int>(poly.size());
  const double a = poly.area();
  const TorsionEstimate w = web_torsion(poly, p, cfg.quadrature);
  const double w_reg = web_torsion_circumscribed(a, regular_perimeter(n, a), q);
  RefinedIsoperimetric r;
  r.lhs = w.value;
  r.rhs = std::pow(gamma(poly), -q) * w_reg;
  const double tol = w.abs_error_bound + 1e-10 * r.rhs;
  r.pass = r.lhs <= r.rhs + tol;
  return r;
}

struct FemComparison {
  TorsionEstimate tau_omega;
  TorsionEstimate tau_regular;
  bool consistent = true;
};

struct ConjectureVerdict {
  double gamma = 1.0;
  Threshold threshold;
  bool certified = false;
  std::optional<FemComparison> fem_comparison;
};

/// Certified iff gamma(poly) >= Gamma_{N,p}; a certified polygon must have
/// smaller torsion than the regular polygon of equal area.
inline ConjectureVerdict conjecture_verdict(const ConvexPolygon& poly, double p, const BoundsConfig& cfg,
                                            bool with_fem) {
  ConjectureVerdict v;
  const int n = static_cast<int>(poly.size());
  v.gamma = gamma(poly);
  v.threshold = gamma_threshold(n, p, cfg);
  v.certified = v.gamma >= v.threshold.value;
  if (with_fem) {
    FemComparison fc;
    fc.tau_omega = torsion(poly, p, cfg.accuracy, cfg.fem);
    fc.tau_regular = torsion(regular_polygon(n, poly.area()), p, cfg.accuracy, cfg.fem);
    if (v.certified)
      fc.consistent = fc.tau_omega.value + fc.tau_omega.abs_error_bound <
                      fc.tau_regular.value - fc.tau_regular.abs_error_bound;
    v.fem_comparison = fc;
  }
  return v;
}

/// 2 sqrt(10) k^3 - 10 k^2 + 3: nonnegative exactly when gamma(T_k) reaches
/// Gamma_{3,2} = sqrt(10)/3.
inline double triangle_criterion(double k) {
  return 2.0 * std::sqrt(10.0) * k * k * k - 10.0 * k * k + 3.0;
}

/// The two positive roots of the triangle criterion, by bisection to 1e-9.
inline std::pair<double, double> triangle_threshold_roots() {
  auto bisect = [](double lo, double hi) {
    double flo = triangle_criterion(lo);
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      const double fm = triangle_criterion(mid);
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  // the cubic's local minimum sits at k = 2 / (0.6 sqrt(10)) ~ 1.054
  const double kmin = 20.0 / (6.0 * std::sqrt(10.0));
  return {bisect(0.1, kmin), bisect(kmin, 10.0)};
}

}  // namespace torsio
