#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "torsio/bounds.hpp"
#include "torsio/io.hpp"
#include "torsio/mesh.hpp"
#include "torsio/offset.hpp"
#include "torsio/plaplace.hpp"
#include "torsio/shape_spec.hpp"
#include "torsio/web_torsion.hpp"

namespace torsio::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3 };

/// Published Gamma_{N,2} values for comparison in `gamma-table`.
inline const std::map<int, double>& reference_gamma_p2() {
  static const std::map<int, double> table{{3, 1.054}, {4, 1.089}, {5, 1.108}, {6, 1.121}, {7, 1.129},
                                           {8, 1.135}, {9, 1.138}, {10, 1.141}, {20, 1.149}};
  return table;
}

/// Worker count for sweeps: TORSIO_THREADS if set and positive, otherwise
/// the hardware concurrency.
inline unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TORSIO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  return n;
}

/// Evaluates f(0..count-1) on up to `threads` workers; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned threads, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// "3..10,20" -> {3, ..., 10, 20}
inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string item = s.substr(pos, comma - pos);
    const std::size_t dots = item.find("..");
    auto to_int = [&](const std::string& t, std::size_t at) {
      int v = 0;
      const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw ParseError(at, "invalid integer '" + t + "'");
      return v;
    };
    if (dots == std::string::npos) {
      out.push_back(to_int(item, pos));
    } else {
      const int a = to_int(item.substr(0, dots), pos), b = to_int(item.substr(dots + 2), pos + dots + 2);
      if (b < a) throw Error(ErrorKind::RangeError, "empty range '" + item + "'");
      for (int v = a; v <= b; ++v) out.push_back(v);
    }
    pos = comma + 1;
  }
  return out;
}

/// "a:step:b" -> a, a+step, ..., up to b inclusive (within half a step).
inline std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> v;
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = k < 2 ? s.find(':', pos) : s.size();
    if (end == std::string::npos) throw ParseError(s.size(), "expected 'start:step:stop'");
    double x = 0.0;
    const auto [p, ec] = std::from_chars(s.data() + pos, s.data() + end, x);
    if (end == pos || ec != std::errc() || p != s.data() + end) throw ParseError(pos, "invalid number in grid");
    v.push_back(x);
    pos = end + 1;
  }
  const double a = v[0], step = v[1], b = v[2];
  if (!(step > 0.0) || !(b >= a)) throw Error(ErrorKind::RangeError, "grid needs step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 0.5));
  if (n > 10'000'000) throw Error(ErrorKind::RangeError, "grid too large");
  std::vector<double> out;
  for (std::size_t i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

/// A bare argument that is not a spec is taken as a polygon file path.
inline ConvexPolygon resolve_shape(const std::string& text) {
  if (text.find(':') == std::string::npos || std::filesystem::exists(text))
    return io::load_polygon_file(text);
  return io::build_shape(parse_shape(text));
}

struct Options {
  std::string shape;
  double p = 2.0;
  double q = 0.0;
  double accuracy = 1e-3;
  std::string output;
  std::string out_path;
  std::string n_list = "3..10,20";
  std::string x_grid = "0:0.1:10";
  std::string mesh_out;
  int max_levels = 6;
  bool with_fem = false;
  bool pretty = false;
};

namespace detail {

inline io::Json shape_header(const Options& o, const ConvexPolygon& poly) {
  io::Json j{{"shape", o.shape}, {"vertices", io::to_json(poly)["vertices"]}};
  return j;
}

inline void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::RangeError, "p must be a finite real > 1");
}

inline std::string emit_json(const io::Json& j, bool pretty) { return (pretty ? j.dump(2) : j.dump()) + "\n"; }

inline std::string verb_metrics(const Options& o) {
  const ConvexPolygon poly = resolve_shape(o.shape);
  const OffsetTrace tr = offset_trace(poly);
  const double r = inradius(poly, tr);
  const InscribedDisk disk = chebyshev_disk(poly);
  if (o.output == "csv") {
    io::CsvWriter w({"N", "area", "perimeter", "cotangent_sum", "inradius", "r_first", "diameter", "gamma",
                     "gamma_tilde", "isoperimetric_defect", "stadium"});
    w.row(static_cast<int>(poly.size()), poly.area(), poly.perimeter(), poly.cotangent_sum(), r, tr.r_first,
          poly.diameter(), gamma(poly), gamma_tilde(poly), isoperimetric_defect(poly), tr.is_stadium());
    return w.str();
  }
  io::Json j = shape_header(o, poly);
  j["N"] = poly.size();
  j["area"] = poly.area();
  j["perimeter"] = poly.perimeter();
  j["cotangent_sum"] = poly.cotangent_sum();
  j["inradius"] = r;
  j["incenter"] = {disk.center.x, disk.center.y};
  j["r_first"] = tr.r_first;
  j["diameter"] = poly.diameter();
  j["gamma"] = gamma(poly);
  j["gamma_tilde"] = gamma_tilde(poly);
  j["isoperimetric_defect"] = isoperimetric_defect(poly);
  j["circumscribed"] = is_circumscribed(poly);
  j["stadium"] = tr.is_stadium();
  return emit_json(j, o.pretty);
}

inline std::string verb_trace(const Options& o) {
  const ConvexPolygon poly = resolve_shape(o.shape);
  const OffsetTrace tr = offset_trace(poly);
  if (o.output == "csv") {
    io::CsvWriter w({"t_start", "t_end", "vertices", "area", "perimeter", "cotangent_sum"});
    for (const auto& p : tr.pieces)
      w.row(p.t_start, p.t_end, static_cast<int>(p.polygon.size()), p.area, p.perimeter, p.cot_sum);
    return w.str();
  }
  io::Json j = shape_header(o, poly);
  j["trace"] = io::to_json(tr);
  return emit_json(j, o.pretty);
}

inline std::string verb_web(const Options& o) {
  check_p(o.p);
  const ConvexPolygon poly = resolve_shape(o.shape);
  const TorsionEstimate w = web_torsion(poly, o.p);
  const double q = w.q, a = poly.area(), l = poly.perimeter(), r = inradius(poly);
  const double per = w.value * std::pow(l, q) / std::pow(a, q + 1.0);
  const double inr = w.value / (std::pow(r, q) * a);
  if (o.output == "csv") {
    io::CsvWriter w2({"p", "q", "value", "abs_error_bound", "method", "perimeter_functional", "inradius_functional"});
    w2.row(w.p, w.q, w.value, w.abs_error_bound, std::string(to_string(w.method)), per, inr);
    return w2.str();
  }
  io::Json j = shape_header(o, poly);
  j["web_torsion"] = io::to_json(w);
  j["perimeter_functional"] = per;
  j["inradius_functional"] = inr;
  return emit_json(j, o.pretty);
}

inline std::string verb_torsion(const Options& o) {
  check_p(o.p);
  const ConvexPolygon poly = resolve_shape(o.shape);
  TorsionOptions fem;
  fem.max_levels = o.max_levels;
  fem.min_levels = std::min(fem.min_levels, o.max_levels);
  if (!o.mesh_out.empty())
    io::write_file(o.mesh_out,
                   io::to_json(triangulate(poly, fem.initial_h_factor * inradius(poly), fem.mesh)).dump() + "\n");
  const TorsionEstimate t = torsion(poly, o.p, o.accuracy, fem);
  if (o.output == "csv") {
    io::CsvWriter w({"p", "q", "value", "abs_error_bound", "method", "observed_rate", "gradient_integral"});
    w.row(t.p, t.q, t.value, t.abs_error_bound, std::string(to_string(t.method)), t.observed_rate,
          t.gradient_integral);
    return w.str();
  }
  io::Json j = shape_header(o, poly);
  j["torsion"] = io::to_json(t);
  return emit_json(j, o.pretty);
}

inline std::string verb_bounds(const Options& o) {
  check_p(o.p);
  const ConvexPolygon poly = resolve_shape(o.shape);
  BoundsConfig cfg;
  cfg.accuracy = o.accuracy;
  const BoundsReport r = evaluate_bounds(poly, o.p, cfg);
  const RefinedIsoperimetric iso = refined_isoperimetric_check(poly, o.p, cfg);
  if (o.output == "csv") {
    io::CsvWriter w({"name", "bound_low", "value", "bound_high", "abs_error", "verdict"});
    for (const auto& c : r.checks)
      w.row(c.name, c.bound_low, c.value, c.bound_high, c.abs_error, std::string(to_string(c.verdict)));
    w.row(std::string("refined_isoperimetric"), 0.0, iso.lhs, iso.rhs, 0.0,
          std::string(iso.pass ? "pass" : "fail"));
    return w.str();
  }
  io::Json j = shape_header(o, poly);
  j["bounds"] = io::to_json(r);
  j["refined_isoperimetric"] = {{"lhs", iso.lhs}, {"rhs", iso.rhs}, {"pass", iso.pass}};
  return emit_json(j, o.pretty);
}

inline std::string verb_gamma_table(const Options& o) {
  check_p(o.p);
  const std::vector<int> ns = parse_int_list(o.n_list);
  for (int n : ns)
    if (n < 3) throw Error(ErrorKind::RangeError, "N must be at least 3");
  BoundsConfig cfg;
  cfg.accuracy = o.accuracy;
  const auto rows = parallel_map<Threshold>(ns.size(), sweep_threads(),
                                            [&](std::size_t i) { return gamma_threshold(ns[i], o.p, cfg); });
  const auto& ref = reference_gamma_p2();
  auto reference = [&](int n) -> std::optional<double> {
    if (o.p != 2.0) return std::nullopt;
    auto it = ref.find(n);
    if (it == ref.end()) return std::nullopt;
    return it->second;
  };
  if (o.output == "json") {
    io::Json arr = io::Json::array();
    for (const auto& t : rows) {
      io::Json j = io::to_json(t);
      const auto rv = reference(t.n);
      j["reference"] = rv ? io::Json(*rv) : io::Json(nullptr);
      j["delta"] = rv ? io::Json(t.value - *rv) : io::Json(nullptr);
      arr.push_back(std::move(j));
    }
    return emit_json(io::Json{{"p", o.p}, {"accuracy", o.accuracy}, {"rows", std::move(arr)}}, o.pretty);
  }
  io::CsvWriter w({"N", "p", "gamma_threshold", "abs_error", "reference", "delta"});
  for (const auto& t : rows) {
    const auto rv = reference(t.n);
    w.row_strings({std::to_string(t.n), io::csv_number(o.p), io::csv_number(t.value), io::csv_number(t.abs_error),
                   rv ? io::csv_number(*rv) : "", rv ? io::csv_number(t.value - *rv) : ""});
  }
  return w.str();
}

inline std::string verb_stadium_sweep(const Options& o) {
  const double q = o.q > 0.0 ? o.q : conjugate_exponent(o.p);
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(ErrorKind::RangeError, "q must be a finite real > 1");
  const std::vector<double> xs = parse_grid(o.x_grid);
  for (double x : xs)
    if (!(x >= 0.0)) throw Error(ErrorKind::RangeError, "x must be nonnegative");
  struct Row {
    double f = 0.0, g = 0.0;
  };
  const auto rows = parallel_map<Row>(xs.size(), sweep_threads(), [&](std::size_t i) {
    return Row{stadium_F(xs[i], q), stadium_inradius_functional(xs[i], q)};
  });
  const double f_lo = 1.0 / (q + 1.0), f_hi = 2.0 / (q + 2.0);
  const double g_lo = 1.0 / ((q + 2.0) * std::pow(2.0, q - 1.0)), g_hi = 1.0 / (q + 1.0);
  if (o.output == "json") {
    io::Json arr = io::Json::array();
    for (std::size_t i = 0; i < xs.size(); ++i)
      arr.push_back({{"x", xs[i]},
                     {"F", rows[i].f},
                     {"inradius_functional", rows[i].g},
                     {"F_inside", rows[i].f > f_lo && rows[i].f < f_hi},
                     {"inradius_inside", rows[i].g > g_lo && rows[i].g < g_hi}});
    return emit_json(io::Json{{"q", q},
                              {"method", to_string(TorsionMethod::ClosedFormStadium)},
                              {"F_bounds", {f_lo, f_hi}},
                              {"inradius_bounds", {g_lo, g_hi}},
                              {"rows", std::move(arr)}},
                     o.pretty);
  }
  io::CsvWriter w({"x", "q", "F", "F_low", "F_high", "F_inside", "inradius_functional", "inradius_low",
                   "inradius_high", "inradius_inside"});
  for (std::size_t i = 0; i < xs.size(); ++i)
    w.row(xs[i], q, rows[i].f, f_lo, f_hi, rows[i].f > f_lo && rows[i].f < f_hi, rows[i].g, g_lo, g_hi,
          rows[i].g > g_lo && rows[i].g < g_hi);
  return w.str();
}

inline std::string verb_conjecture(const Options& o) {
  check_p(o.p);
  const ConvexPolygon poly = resolve_shape(o.shape);
  BoundsConfig cfg;
  cfg.accuracy = o.accuracy;
  const ConjectureVerdict v = conjecture_verdict(poly, o.p, cfg, o.with_fem);
  if (o.output == "csv") {
    io::CsvWriter w({"N", "gamma", "threshold", "threshold_abs_error", "certified", "fem_consistent"});
    w.row_strings({std::to_string(poly.size()), io::csv_number(v.gamma), io::csv_number(v.threshold.value),
                   io::csv_number(v.threshold.abs_error), v.certified ? "true" : "false",
                   v.fem_comparison ? (v.fem_comparison->consistent ? "true" : "false") : ""});
    return w.str();
  }
  io::Json j = shape_header(o, poly);
  j["verdict"] = io::to_json(v);
  return emit_json(j, o.pretty);
}

inline std::string verb_triangle_roots(const Options& o) {
  const auto [lo, hi] = triangle_threshold_roots();
  if (o.output == "csv") {
    io::CsvWriter w({"k_low", "k_high", "residual_low", "residual_high"});
    w.row(lo, hi, triangle_criterion(lo), triangle_criterion(hi));
    return w.str();
  }
  return emit_json(io::Json{{"k_low", lo},
                            {"k_high", hi},
                            {"residual_low", triangle_criterion(lo)},
                            {"residual_high", triangle_criterion(hi)}},
                   o.pretty);
}

}  // namespace detail

/// Runs one command line (without the program name). Output goes to `out`
/// or to --out; diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Web torsion, p-torsion and shape bounds for convex polygons", "torsio"};
  app.require_subcommand(1);
  Options o;
  using Fn = std::string (*)(const Options&);
  std::vector<std::pair<CLI::App*, Fn>> verbs;
  auto add = [&](const char* name, const char* help, Fn fn, bool shape, bool p, bool accuracy, const char* def_out) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (shape) sub->add_option("--shape,-s", o.shape, "shape spec or polygon JSON file")->required();
    if (p) sub->add_option("--p", o.p, "exponent p > 1");
    if (accuracy) sub->add_option("--accuracy", o.accuracy, "target relative error for FEM values");
    sub->add_option("--output,-o", o.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", o.out_path, "write output to this file");
    sub->add_flag("--pretty", o.pretty, "indent JSON");
    sub->final_callback([&o, def_out] {
      if (o.output.empty()) o.output = def_out;
    });
    verbs.emplace_back(sub, fn);
    return sub;
  };
  add("metrics", "geometric metrics and asymmetry measures", detail::verb_metrics, true, false, false, "json");
  add("trace", "Steiner pieces of the inner parallel sets", detail::verb_trace, true, false, false, "json");
  add("web", "exact web p-torsion", detail::verb_web, true, true, false, "json");
  {
    CLI::App* sub = add("torsion", "finite element p-torsion", detail::verb_torsion, true, true, true, "json");
    sub->add_option("--mesh-out", o.mesh_out, "export the coarsest mesh as JSON");
    sub->add_option("--max-levels", o.max_levels, "maximum number of mesh levels")->check(CLI::Range(2, 12));
  }
  add("bounds", "shape functionals checked against the isoperimetric bounds", detail::verb_bounds, true, true, true,
      "json");
  add("gamma-table", "asymmetry thresholds of regular polygons", detail::verb_gamma_table, false, true, true, "csv")
      ->add_option("--N", o.n_list, "vertex counts, e.g. 3..10,20");
  {
    CLI::App* sub =
        add("stadium-sweep", "stadium functionals over x = 2 R l / |P|", detail::verb_stadium_sweep, false, true,
            false, "csv");
    sub->add_option("--q", o.q, "conjugate exponent (overrides --p)");
    sub->add_option("--x", o.x_grid, "grid start:step:stop");
  }
  add("conjecture", "certify the torsion comparison with the regular polygon", detail::verb_conjecture, true, true,
      true, "json")
      ->add_flag("--with-fem", o.with_fem, "also compare FEM torsion values");
  add("triangle-roots", "roots of the isosceles triangle criterion", detail::verb_triangle_roots, false, false, false,
      "json");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  try {
    for (const auto& [sub, fn] : verbs) {
      if (!sub->parsed()) continue;
      const std::string text = fn(o);
      if (o.out_path.empty())
        out << text;
      else
        io::write_file(o.out_path, text);
      return kOk;
    }
    err << "error: no command\n";
    return kValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_numerical() ? kNumerical : kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace torsio::cli
