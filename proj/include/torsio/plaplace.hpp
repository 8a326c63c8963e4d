#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "torsio/error.hpp"
#include "torsio/mesh.hpp"
#include "torsio/offset.hpp"
#include "torsio/web_torsion.hpp"

namespace torsio {

/// Discrete solution of -div(|grad u|^(p-2) grad u) = 1, u = 0 on the boundary.
struct SolveReport {
  std::vector<double> u;         // per node, zero on boundary nodes
  double energy = 0.0;           // J_p(u) = int |grad u|^p / p - int u
  double torsion = 0.0;          // int u
  double gradient_integral = 0.0;  // int |grad u|^p
  double energy_torsion = 0.0;   // p / (1 - p) * J_p(u), a third torsion value
  int iterations = 0;
  double residual = 0.0;         // relative norm of the discrete gradient of J
};

struct SolverOptions {
  int max_iterations_per_level = 200;
  /// Stopping tolerances on the last regularization level. Earlier levels
  /// only need to hand a reasonable start to the next one.
  double step_tol = 1e-10;
  double energy_tol = 1e-14;
  double coarse_step_tol = 1e-5;
  /// Optional starting guess (per node); boundary values are ignored.
  const std::vector<double>* initial_guess = nullptr;
};

/// Regularization levels {1e-1, ..., 1e-8} scaled by `diameter`.
inline std::vector<double> default_eps_schedule(double diameter) {
  std::vector<double> s;
  for (int k = 1; k <= 8; ++k) s.push_back(std::pow(10.0, -k) * diameter);
  return s;
}

SolveReport solve_p2(const TriMesh& mesh);
SolveReport solve_p(const TriMesh& mesh, double p, const std::vector<double>& eps_schedule,
                    const SolverOptions& opt = {});

struct TorsionOptions {
  /// First mesh size as a fraction of the inradius.
  double initial_h_factor = 0.5;
  int min_levels = 3;
  int max_levels = 6;
  /// Stop refining before a level would exceed this many nodes.
  std::size_t max_nodes = 1'500'000;
  /// Observed rates further than this from 2 are flagged.
  double rate_tolerance = 0.5;
  MeshOptions mesh;
};

/// FEM p-torsion with Richardson extrapolation over nested uniform
/// refinements. Throws NoConvergence if the error bound cannot be brought
/// below `target_rel_err` within the level and node caps.
TorsionEstimate torsion(const ConvexPolygon& poly, double p, double target_rel_err,
                        const TorsionOptions& opt = {});

// ---------------------------------------------------------------------------

namespace detail {

/// Per-element geometry and the sparse pattern of the interior-node stiffness
/// matrix, with each local entry mapped to its slot in the value array.
class P1System {
 public:
  explicit P1System(const TriMesh& mesh) : mesh_(mesh) {
    const std::size_t nn = mesh.nodes.size();
    dof_.assign(nn, -1);
    for (std::size_t i = 0; i < nn; ++i)
      if (!mesh.boundary_flags[i]) dof_[i] = ndof_++;
    if (ndof_ == 0) throw Error(ErrorKind::SingularSystem, "mesh has no interior nodes");
    const std::size_t nt = mesh.triangles.size();
    area_.resize(nt);
    grad_.resize(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& v = mesh.triangles[t];
      const Vec2 a = mesh.nodes[v[0]], b = mesh.nodes[v[1]], c = mesh.nodes[v[2]];
      const double area2 = cross(b - a, c - a);
      if (!(area2 > 0.0)) throw Error(ErrorKind::SingularSystem, "degenerate or inverted element");
      area_[t] = 0.5 * area2;
      // grad phi_i = perp(opposite edge) / (2 area), pointing towards vertex i
      const Vec2 e0 = c - b, e1 = a - c, e2 = b - a;
      grad_[t] = {Vec2{-e0.y, e0.x} / area2, Vec2{-e1.y, e1.x} / area2, Vec2{-e2.y, e2.x} / area2};
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * nt);
    for (const auto& v : mesh.triangles)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (dof_[v[i]] >= 0 && dof_[v[j]] >= 0) trip.emplace_back(dof_[v[i]], dof_[v[j]], 0.0);
    K_.resize(ndof_, ndof_);
    K_.setFromTriplets(trip.begin(), trip.end());
    K_.makeCompressed();
    slot_.assign(9 * nt, -1);
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& v = mesh.triangles[t];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const int r = dof_[v[i]], c = dof_[v[j]];
          if (r < 0 || c < 0) continue;
          const int* inner = K_.innerIndexPtr();
          const int begin = K_.outerIndexPtr()[c], end = K_.outerIndexPtr()[c + 1];
          slot_[9 * t + 3 * i + j] = static_cast<int>(std::lower_bound(inner + begin, inner + end, r) - inner);
        }
    }
    load_ = Eigen::VectorXd::Zero(ndof_);
    for (std::size_t t = 0; t < nt; ++t)
      for (int i = 0; i < 3; ++i)
        if (const int r = dof_[mesh.triangles[t][i]]; r >= 0) load_[r] += area_[t] / 3.0;
  }

  int ndof() const noexcept { return ndof_; }
  const Eigen::VectorXd& load() const noexcept { return load_; }
  std::size_t num_elements() const noexcept { return area_.size(); }
  double area(std::size_t t) const { return area_[t]; }

  Vec2 gradient(std::size_t t, const Eigen::VectorXd& x) const {
    const auto& v = mesh_.triangles[t];
    Vec2 g{0.0, 0.0};
    for (int i = 0; i < 3; ++i)
      if (const int r = dof_[v[i]]; r >= 0) g += x[r] * grad_[t][i];
    return g;
  }

  /// Stiffness matrix for elementwise constant coefficients.
  const Eigen::SparseMatrix<double>& assemble(const std::vector<double>& coeff) {
    std::fill(K_.valuePtr(), K_.valuePtr() + K_.nonZeros(), 0.0);
    double* val = K_.valuePtr();
    for (std::size_t t = 0; t < area_.size(); ++t) {
      const double w = coeff[t] * area_[t];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (const int s = slot_[9 * t + 3 * i + j]; s >= 0) val[s] += w * dot(grad_[t][i], grad_[t][j]);
    }
    return K_;
  }

  double integral(const Eigen::VectorXd& x) const { return load_.dot(x); }

  std::vector<double> to_nodes(const Eigen::VectorXd& x) const {
    std::vector<double> u(dof_.size(), 0.0);
    for (std::size_t i = 0; i < dof_.size(); ++i)
      if (dof_[i] >= 0) u[i] = x[dof_[i]];
    return u;
  }
  Eigen::VectorXd from_nodes(const std::vector<double>& u) const {
    Eigen::VectorXd x(ndof_);
    for (std::size_t i = 0; i < dof_.size(); ++i)
      if (dof_[i] >= 0) x[dof_[i]] = u[i];
    return x;
  }

 private:
  const TriMesh& mesh_;
  std::vector<int> dof_;
  int ndof_ = 0;
  std::vector<double> area_;
  std::vector<std::array<Vec2, 3>> grad_;
  Eigen::SparseMatrix<double> K_;
  std::vector<int> slot_;
  Eigen::VectorXd load_;
};

using Cholesky = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;

inline void factorize(Cholesky& chol, const Eigen::SparseMatrix<double>& K, bool analyze) {
  if (analyze) chol.analyzePattern(K);
  chol.factorize(K);
  if (chol.info() != Eigen::Success)
    throw Error(ErrorKind::SingularSystem, "sparse factorization failed");
  const auto d = chol.vectorD();
  if ((d.array() <= 0.0).any()) throw Error(ErrorKind::SingularSystem, "stiffness matrix is not positive definite");
}

inline void finish_report(SolveReport& r, const P1System& sys, const Eigen::VectorXd& x, double p) {
  double grad_p = 0.0;
  for (std::size_t t = 0; t < sys.num_elements(); ++t)
    grad_p += sys.area(t) * std::pow(norm(sys.gradient(t, x)), p);
  r.u = sys.to_nodes(x);
  r.torsion = sys.integral(x);
  r.gradient_integral = grad_p;
  r.energy = grad_p / p - r.torsion;
  r.energy_torsion = p / (1.0 - p) * r.energy;
}

}  // namespace detail

inline SolveReport solve_p2(const TriMesh& mesh) {
  detail::P1System sys(mesh);
  const std::vector<double> ones(sys.num_elements(), 1.0);
  const auto& K = sys.assemble(ones);
  detail::Cholesky chol;
  detail::factorize(chol, K, true);
  const Eigen::VectorXd x = chol.solve(sys.load());
  SolveReport r;
  r.iterations = 1;
  r.residual = (K * x - sys.load()).norm() / sys.load().norm();
  detail::finish_report(r, sys, x, 2.0);
  return r;
}

inline SolveReport solve_p(const TriMesh& mesh, double p, const std::vector<double>& eps_schedule,
                           const SolverOptions& opt) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::RangeError, "p must be a finite real > 1");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0.0) || !std::isfinite(eps_schedule[k]))
      throw Error(ErrorKind::BadSchedule, "regularization levels must be positive and finite");
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1]))
      throw Error(ErrorKind::BadSchedule, "regularization levels must be strictly decreasing");
  }
  if (p == 2.0) return solve_p2(mesh);
  if (eps_schedule.empty()) throw Error(ErrorKind::BadSchedule, "empty regularization schedule for p != 2");

  detail::P1System sys(mesh);
  const std::size_t ne = sys.num_elements();
  const Eigen::VectorXd& b = sys.load();
  std::vector<double> coeff(ne, 1.0);
  detail::Cholesky chol;
  detail::factorize(chol, sys.assemble(coeff), true);

  Eigen::VectorXd x;
  if (opt.initial_guess) {
    x = sys.from_nodes(*opt.initial_guess);
  } else {
    // Scale the Laplace solution to the magnitude of the p-torsion function
    // on a disk of the same torsion: |grad u|^(p-2) ~ (|grad u_2|)^(p-2).
    x = chol.solve(b);
    double gmax = 0.0;
    for (std::size_t t = 0; t < ne; ++t) gmax = std::max(gmax, norm(sys.gradient(t, x)));
    if (gmax > 0.0) x *= std::pow(gmax, (2.0 - p) / (p - 1.0));
  }

  std::vector<Vec2> g(ne), dg(ne);
  auto energy = [&](const Eigen::VectorXd& v, double eps2) {
    double e = 0.0;
    for (std::size_t t = 0; t < ne; ++t) e += sys.area(t) * std::pow(norm2(sys.gradient(t, v)) + eps2, 0.5 * p);
    return e / p - sys.integral(v);
  };

  SolveReport rep;
  for (std::size_t level = 0; level < eps_schedule.size(); ++level) {
    const double eps2 = eps_schedule[level] * eps_schedule[level];
    const bool last = level + 1 == eps_schedule.size();
    const double step_tol = last ? opt.step_tol : opt.coarse_step_tol;
    double J = energy(x, eps2);
    bool converged = false;
    for (int it = 0; it < opt.max_iterations_per_level; ++it) {
      ++rep.iterations;
      for (std::size_t t = 0; t < ne; ++t) {
        g[t] = sys.gradient(t, x);
        coeff[t] = std::pow(norm2(g[t]) + eps2, 0.5 * (p - 2.0));
      }
      const auto& K = sys.assemble(coeff);
      detail::factorize(chol, K, false);
      const Eigen::VectorXd res = K * x - b;
      rep.residual = res.norm() / b.norm();
      const Eigen::VectorXd d = -chol.solve(res);  // Picard step: K(u) (u + d) = b
      for (std::size_t t = 0; t < ne; ++t) dg[t] = sys.gradient(t, d);
      const double load_d = sys.integral(d);

      // One-dimensional convex minimization of J along d by safeguarded
      // Newton, falling back to halving whenever the energy goes up.
      auto slope = [&](double a, double& curv) {
        double s = 0.0;
        curv = 0.0;
        for (std::size_t t = 0; t < ne; ++t) {
          const Vec2 w = g[t] + a * dg[t];
          const double m = norm2(w) + eps2, wd = dot(w, dg[t]);
          const double k = std::pow(m, 0.5 * (p - 2.0));
          s += sys.area(t) * k * wd;
          curv += sys.area(t) * (k * norm2(dg[t]) + (p - 2.0) * k / m * wd * wd);
        }
        return s - load_d;
      };
      double alpha = 1.0;
      for (int k = 0; k < 8; ++k) {
        double curv = 0.0;
        const double s = slope(alpha, curv);
        if (!(curv > 0.0)) break;
        const double next = std::clamp(alpha - s / curv, 0.05 * alpha, 4.0 * alpha);
        if (std::abs(next - alpha) <= 1e-6 * alpha) {
          alpha = next;
          break;
        }
        alpha = next;
      }
      Eigen::VectorXd trial = x + alpha * d;
      double Jt = energy(trial, eps2);
      for (int k = 0; k < 60 && Jt > J; ++k) {
        alpha *= 0.5;
        trial = x + alpha * d;
        Jt = energy(trial, eps2);
      }
      if (Jt > J) {
        // No decrease in floating point: at the minimum to working precision.
        converged = true;
        break;
      }
      const double step = alpha * d.lpNorm<Eigen::Infinity>();
      const double drop = J - Jt;
      x.swap(trial);
      J = Jt;
      const double scale = std::max(x.lpNorm<Eigen::Infinity>(), std::numeric_limits<double>::min());
      if (step <= step_tol * scale && (!last || drop <= opt.energy_tol * std::abs(J) + 1e-300)) {
        converged = true;
        break;
      }
      if (step <= 1e-2 * step_tol * scale) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw Error(ErrorKind::NoConvergence, "Picard iteration did not converge within " +
                                                std::to_string(opt.max_iterations_per_level) +
                                                " steps at regularization level " + std::to_string(level));
  }
  detail::finish_report(rep, sys, x, p);
  return rep;
}

namespace detail {

inline std::vector<double> prolongate(const std::vector<double>& u, std::size_t coarse_nodes,
                                      const std::vector<std::array<int, 2>>& parents,
                                      const std::vector<bool>& boundary) {
  std::vector<double> out(coarse_nodes + parents.size());
  std::copy(u.begin(), u.end(), out.begin());
  for (std::size_t i = 0; i < parents.size(); ++i)
    out[coarse_nodes + i] = boundary[coarse_nodes + i] ? 0.0 : 0.5 * (u[parents[i][0]] + u[parents[i][1]]);
  return out;
}

struct Extrapolation {
  double value = 0.0;
  double bound = 0.0;
  double rate = 2.0;
  bool anomaly = false;
};

/// Richardson extrapolation of a sequence computed at h, h/2, h/4, ...
/// The order is the observed one from the last three levels when it is
/// plausible, otherwise 2; the bound compares the last two extrapolants.
inline Extrapolation richardson(const std::vector<double>& v, double rate_tolerance) {
  Extrapolation e;
  const std::size_t n = v.size();
  if (n < 2) {
    e.value = v.back();
    e.bound = std::numeric_limits<double>::infinity();
    return e;
  }
  double rate = 2.0;
  if (n >= 3) {
    const double d1 = v[n - 2] - v[n - 3], d2 = v[n - 1] - v[n - 2];
    const double observed = (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 0.0) ? std::log2(d1 / d2)
                                                                       : std::numeric_limits<double>::quiet_NaN();
    e.anomaly = !(std::abs(observed - 2.0) <= rate_tolerance);
    e.rate = observed;
    if (std::isfinite(observed) && observed >= 0.75 && observed <= 4.0) rate = observed;
  }
  const double f = 1.0 / (std::exp2(rate) - 1.0);
  auto extrap = [&](std::size_t k) { return v[k] + (v[k] - v[k - 1]) * f; };
  e.value = extrap(n - 1);
  const double correction = std::abs(e.value - v[n - 1]);
  if (n >= 3) {
    e.bound = std::max(std::abs(e.value - extrap(n - 2)), 0.1 * correction);
  } else {
    e.bound = correction;
  }
  if (e.anomaly) e.bound = std::max(e.bound, correction);
  return e;
}

}  // namespace detail

inline TorsionEstimate torsion(const ConvexPolygon& poly, double p, double target_rel_err,
                               const TorsionOptions& opt) {
  if (!(target_rel_err >= 1e-4) || !std::isfinite(target_rel_err))
    throw Error(ErrorKind::RangeError, "target relative error must be at least 1e-4");
  const double q = conjugate_exponent(p);
  const double r = inradius(poly);
  const std::vector<double> schedule = p == 2.0 ? std::vector<double>{} : default_eps_schedule(poly.diameter());

  TorsionEstimate est;
  est.method = TorsionMethod::FEM;
  est.p = p;
  est.q = q;

  TriMesh mesh = triangulate(poly, opt.initial_h_factor * r, opt.mesh);
  std::vector<double> tau, grad;
  std::vector<double> warm;
  std::vector<std::array<int, 2>> parents;
  detail::Extrapolation et, eg;
  for (int level = 0;; ++level) {
    SolverOptions so;
    std::vector<double> sched = schedule;
    if (!warm.empty() && !sched.empty()) {
      so.initial_guess = &warm;
      sched = {schedule.back()};
    }
    const SolveReport rep = solve_p(mesh, p, sched, so);
    tau.push_back(rep.torsion);
    grad.push_back(rep.gradient_integral);
    est.mesh_sizes.push_back(mesh.h);
    et = detail::richardson(tau, opt.rate_tolerance);
    eg = detail::richardson(grad, opt.rate_tolerance);
    const int levels = level + 1;
    if (levels >= opt.min_levels && et.bound <= target_rel_err * std::abs(et.value)) break;
    const bool node_cap = 4 * mesh.nodes.size() > opt.max_nodes;
    if (levels >= opt.max_levels || node_cap) {
      const std::string reason = levels < opt.min_levels ? " before the minimum of " + std::to_string(opt.min_levels)
                                                         : " with error bound " +
                                                               std::to_string(et.bound / std::abs(et.value)) +
                                                               " above target " + std::to_string(target_rel_err);
      throw Error(ErrorKind::NoConvergence, std::string(node_cap ? "node limit" : "level limit") + " reached after " +
                                                std::to_string(levels) + " levels" + reason);
    }
    if (!schedule.empty()) {
      TriMesh fine = refine_uniform(mesh, &parents);
      warm = detail::prolongate(rep.u, mesh.nodes.size(), parents, fine.boundary_flags);
      mesh = std::move(fine);
    } else {
      mesh = refine_uniform(mesh);
    }
  }
  est.value = et.value;
  est.abs_error_bound = et.bound;
  est.observed_rate = et.rate;
  est.rate_anomaly = et.anomaly;
  est.gradient_integral = eg.value;
  return est;
}

}  // namespace torsio
