#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "torsio/error.hpp"
#include "torsio/offset.hpp"
#include "torsio/quadrature.hpp"

namespace torsio {

/// Conjugate exponent q = p / (p - 1).
inline double conjugate_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::RangeError, "p must satisfy 1 < p < inf");
  return p / (p - 1.0);
}

enum class TorsionMethod { ExactTracePiecewise, ClosedFormCircumscribed, ClosedFormStadium, FEM };

inline const char* to_string(TorsionMethod m) {
  switch (m) {
    case TorsionMethod::ExactTracePiecewise: return "ExactTracePiecewise";
    case TorsionMethod::ClosedFormCircumscribed: return "ClosedFormCircumscribed";
    case TorsionMethod::ClosedFormStadium: return "ClosedFormStadium";
    case TorsionMethod::FEM: return "FEM";
  }
  return "Unknown";
}

/// A torsion-like value with an error bar and a record of how it was obtained.
struct TorsionEstimate {
  double value = 0.0;
  double abs_error_bound = 0.0;
  TorsionMethod method = TorsionMethod::ExactTracePiecewise;
  double p = 2.0;
  double q = 2.0;
  // FEM only: mesh sizes of the levels used, observed convergence rate, and
  // the second torsion expression (integral of |grad u|^p) extrapolated alike.
  std::vector<double> mesh_sizes;
  double observed_rate = 0.0;
  double gradient_integral = 0.0;
  bool rate_anomaly = false;

  double rel_error() const { return abs_error_bound / value; }
};

/// Web p-torsion w_p = int_0^R |Omega_t|^q / |dOmega_t|^(q-1) dt, integrated
/// piece by piece over the Steiner polynomials of the trace.
inline TorsionEstimate web_torsion(const OffsetTrace& trace, double p, const QuadratureConfig& cfg = {}) {
  const double q = conjugate_exponent(p);
  TorsionEstimate est;
  est.method = TorsionMethod::ExactTracePiecewise;
  est.p = p;
  est.q = q;
  for (const SteinerPiece& piece : trace.pieces) {
    auto integrand = [&](double t) {
      const double a = std::max(0.0, piece.area_at(t));
      const double l = piece.perimeter_at(t);
      if (!(l > 0.0) || a == 0.0) return 0.0;
      return std::pow(a, q) / std::pow(l, q - 1.0);
    };
    const QuadratureResult r = integrate(integrand, piece.t_start, piece.t_end, cfg);
    est.value += r.value;
    est.abs_error_bound += r.abs_error;
  }
  if (!(est.value > 0.0)) throw Error(ErrorKind::NumericalCollapse, "web torsion evaluated to zero");
  return est;
}

inline TorsionEstimate web_torsion(const ConvexPolygon& poly, double p, const QuadratureConfig& cfg = {}) {
  return web_torsion(offset_trace(poly), p, cfg);
}

/// Closed form on circumscribed polygons: (2/(q+2)) |P|^(q+1) / |dP|^q.
inline double web_torsion_circumscribed(double area, double perimeter, double q) {
  if (!(q > 1.0)) throw Error(ErrorKind::RangeError, "q must exceed 1");
  return 2.0 / (q + 2.0) * std::pow(area, q + 1.0) / std::pow(perimeter, q);
}

/// int_0^1 t^q (x+t)^q / (x+2t)^(q-1) dt, the kernel shared by the stadium
/// closed forms.
inline QuadratureResult stadium_kernel(double x, double q, const QuadratureConfig& cfg = {}) {
  if (!(x >= 0.0)) throw Error(ErrorKind::RangeError, "x must be nonnegative");
  if (!(q > 1.0)) throw Error(ErrorKind::RangeError, "q must exceed 1");
  auto f = [=](double t) {
    if (t <= 0.0) return 0.0;
    return std::pow(t, q) * std::pow(x + t, q) / std::pow(x + 2.0 * t, q - 1.0);
  };
  return integrate(f, 0.0, 1.0, cfg);
}

/// w_p |dP^l|^q / |P^l|^(q+1) for a stadium with x = 2 R l / |P|.
inline double stadium_F(double x, double q, const QuadratureConfig& cfg = {}) {
  const double k = stadium_kernel(x, q, cfg).value;
  return std::pow(x + 2.0, q) / std::pow(x + 1.0, q + 1.0) * k;
}

/// w_p / (R^q |P^l|) for a stadium with x = 2 R l / |P|.
inline double stadium_inradius_functional(double x, double q, const QuadratureConfig& cfg = {}) {
  return stadium_kernel(x, q, cfg).value / (x + 1.0);
}

/// w_p of the stadium P^l built on a circumscribed core of area `core_area`
/// and inradius `r`.
inline TorsionEstimate web_torsion_stadium(double core_area, double r, double ell, double p,
                                           const QuadratureConfig& cfg = {}) {
  const double q = conjugate_exponent(p);
  const double x = 2.0 * r * ell / core_area;
  const double area = core_area + 2.0 * ell * r;
  const double perim = 2.0 * core_area / r + 2.0 * ell;
  const QuadratureResult k = stadium_kernel(x, q, cfg);
  const double scale = std::pow(x + 2.0, q) / std::pow(x + 1.0, q + 1.0) * std::pow(area, q + 1.0) /
                       std::pow(perim, q);
  TorsionEstimate est;
  est.value = k.value * scale;
  est.abs_error_bound = k.abs_error * scale;
  est.method = ell == 0.0 ? TorsionMethod::ClosedFormCircumscribed : TorsionMethod::ClosedFormStadium;
  est.p = p;
  est.q = q;
  return est;
}

struct PhiPsi {
  double phi = 0.0;
  double psi = 0.0;
};

/// Phi(y) = I(y) - 2/(q+2) g(y) and Psi(y) = I(y) - 1/(q+1) g(y), with
/// I(y) = int_0^y s^q (1+s)^q / (1+2s)^(q-1) ds and
/// g(y) = y^(q+1) (1+y)^(q+1) / (1+2y)^q.
inline PhiPsi phi_psi(double y, double q, const QuadratureConfig& cfg = {}) {
  if (!(y > 0.0)) throw Error(ErrorKind::RangeError, "y must be positive");
  if (!(q > 1.0)) throw Error(ErrorKind::RangeError, "q must exceed 1");
  auto f = [=](double s) {
    if (s <= 0.0) return 0.0;
    return std::pow(s, q) * std::pow(1.0 + s, q) / std::pow(1.0 + 2.0 * s, q - 1.0);
  };
  const double integral = integrate(f, 0.0, y, cfg).value;
  const double g = std::pow(y, q + 1.0) * std::pow(1.0 + y, q + 1.0) / std::pow(1.0 + 2.0 * y, q);
  return {integral - 2.0 / (q + 2.0) * g, integral - 1.0 / (q + 1.0) * g};
}

/// Closed-form derivatives of Phi and Psi.
inline double phi_prime(double y, double q) {
  return -q / (q + 2.0) * std::pow(y, q) * std::pow(1.0 + y, q) / std::pow(1.0 + 2.0 * y, q + 1.0);
}
inline double psi_prime(double y, double q) {
  return 2.0 * q / (q + 1.0) * std::pow(y, q + 1.0) * std::pow(1.0 + y, q + 1.0) /
         std::pow(1.0 + 2.0 * y, q + 1.0);
}

}  // namespace torsio
