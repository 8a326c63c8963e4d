#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "torsio/bounds.hpp"
#include "torsio/error.hpp"
#include "torsio/mesh.hpp"
#include "torsio/offset.hpp"
#include "torsio/polygon.hpp"
#include "torsio/shape_spec.hpp"
#include "torsio/shapes.hpp"
#include "torsio/web_torsion.hpp"

namespace torsio::io {

using Json = nlohmann::ordered_json;

// ---- polygons --------------------------------------------------------------

inline Json to_json(const ConvexPolygon& poly) {
  Json v = Json::array();
  for (const Vec2& p : poly.vertices()) v.push_back({p.x, p.y});
  return Json{{"vertices", std::move(v)}};
}

inline ConvexPolygon polygon_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
    throw Error(ErrorKind::InvalidArgument, "polygon JSON needs a \"vertices\" array");
  std::vector<Vec2> pts;
  for (const Json& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw Error(ErrorKind::InvalidArgument, "each vertex must be a pair of numbers");
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return ConvexPolygon::from_vertices(pts);
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte, std::string("invalid JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

inline ConvexPolygon load_polygon_file(const std::string& path) { return polygon_from_json(parse_json(read_file(path))); }

inline void save_polygon_file(const std::string& path, const ConvexPolygon& poly) {
  write_file(path, to_json(poly).dump(2) + "\n");
}

// ---- shape specs -----------------------------------------------------------

inline ConvexPolygon build_shape(const ShapeSpec& s) {
  struct Visitor {
    ConvexPolygon operator()(const spec::Regular& r) const { return regular_polygon(r.n, r.area); }
    ConvexPolygon operator()(const spec::IsoscelesT& t) const { return isosceles_T(t.k); }
    ConvexPolygon operator()(const spec::RectangleStrip& r) const { return rectangle_strip(r.ell); }
    ConvexPolygon operator()(const spec::Stadium& s) const { return stadium(build_shape(*s.core), s.ell); }
    ConvexPolygon operator()(const spec::Circumscribed& c) const { return circumscribed_polygon(c.angles, c.r); }
    ConvexPolygon operator()(const spec::RandomConvex& r) const { return random_convex(r.n, r.seed); }
    ConvexPolygon operator()(const spec::File& f) const { return load_polygon_file(f.path); }
  };
  return std::visit(Visitor{}, s.family);
}

inline Json to_json(const ShapeSpec& s) {
  struct Visitor {
    Json operator()(const spec::Regular& r) const { return {{"family", "regular"}, {"N", r.n}, {"area", r.area}}; }
    Json operator()(const spec::IsoscelesT& t) const { return {{"family", "isoT"}, {"k", t.k}}; }
    Json operator()(const spec::RectangleStrip& r) const { return {{"family", "rect"}, {"ell", r.ell}}; }
    Json operator()(const spec::Stadium& s) const {
      return {{"family", "stadium"}, {"core", to_json(*s.core)}, {"ell", s.ell}};
    }
    Json operator()(const spec::Circumscribed& c) const {
      return {{"family", "circ"}, {"R", c.r}, {"angles", c.angles}};
    }
    Json operator()(const spec::RandomConvex& r) const {
      return {{"family", "random"}, {"n", r.n}, {"seed", r.seed}};
    }
    Json operator()(const spec::File& f) const { return {{"family", "file"}, {"path", f.path}}; }
  };
  return std::visit(Visitor{}, s.family);
}

inline ShapeSpec shape_spec_from_json(const Json& j) {
  try {
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "regular") {
      const int n = j.at("N").get<int>();
      const double a = j.at("area").get<double>();
      if (n < 3 || !(a > 0.0)) throw Error(ErrorKind::RangeError, "regular polygon needs N >= 3 and area > 0");
      return {spec::Regular{n, a}};
    }
    if (fam == "isoT") return {spec::IsoscelesT{j.at("k").get<double>()}};
    if (fam == "rect") return {spec::RectangleStrip{j.at("ell").get<double>()}};
    if (fam == "stadium")
      return {spec::Stadium{std::make_shared<const ShapeSpec>(shape_spec_from_json(j.at("core"))),
                            j.at("ell").get<double>()}};
    if (fam == "circ") return {spec::Circumscribed{j.at("angles").get<std::vector<double>>(), j.at("R").get<double>()}};
    if (fam == "random") return {spec::RandomConvex{j.at("n").get<int>(), j.at("seed").get<std::uint64_t>()}};
    if (fam == "file") return {spec::File{j.at("path").get<std::string>()}};
    throw Error(ErrorKind::InvalidArgument, "unknown shape family '" + fam + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed shape JSON: ") + e.what());
  }
}

// ---- results ---------------------------------------------------------------

inline Json to_json(const TriMesh& m) {
  Json nodes = Json::array(), tris = Json::array(), bnd = Json::array();
  for (const Vec2& p : m.nodes) nodes.push_back({p.x, p.y});
  for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
  for (bool b : m.boundary_flags) bnd.push_back(b);
  return Json{{"h", m.h}, {"nodes", std::move(nodes)}, {"triangles", std::move(tris)}, {"boundary", std::move(bnd)}};
}

inline Json to_json(const TorsionEstimate& e) {
  Json j{{"value", e.value},
         {"abs_error_bound", e.abs_error_bound},
         {"rel_error_bound", e.rel_error()},
         {"method", to_string(e.method)},
         {"p", e.p},
         {"q", e.q}};
  if (e.method == TorsionMethod::FEM) {
    j["mesh_sizes"] = e.mesh_sizes;
    j["observed_rate"] = e.observed_rate;
    j["rate_anomaly"] = e.rate_anomaly;
    j["gradient_integral"] = e.gradient_integral;
  }
  return j;
}

inline Json to_json(const OffsetTrace& tr) {
  Json pieces = Json::array();
  for (const SteinerPiece& p : tr.pieces) {
    pieces.push_back({{"t_start", p.t_start},
                      {"t_end", p.t_end},
                      {"vertices", p.polygon.size()},
                      {"area", p.area},
                      {"perimeter", p.perimeter},
                      {"cotangent_sum", p.cot_sum}});
  }
  Json ext{{"kind", tr.extinction.kind == Extinction::Kind::Point ? "point" : "segment"},
           {"length", tr.extinction.length},
           {"a", {tr.extinction.a.x, tr.extinction.a.y}},
           {"b", {tr.extinction.b.x, tr.extinction.b.y}}};
  return Json{{"r_first", tr.r_first},
              {"inradius", tr.inradius},
              {"stadium", tr.is_stadium()},
              {"pieces", std::move(pieces)},
              {"extinction", std::move(ext)}};
}

inline Json to_json(const BoundCheck& c) {
  return Json{{"name", c.name},
              {"bound_low", c.bound_low},
              {"low_strict", c.low_strict},
              {"bound_high", c.bound_high},
              {"high_strict", c.high_strict},
              {"value", c.value},
              {"abs_error", c.abs_error},
              {"verdict", to_string(c.verdict)},
              {"pass", c.pass()}};
}

inline Json to_json(const BoundsReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return Json{{"p", r.p},
              {"q", r.q},
              {"area", r.area},
              {"perimeter", r.perimeter},
              {"inradius", r.inradius},
              {"web", to_json(r.web)},
              {"torsion", to_json(r.torsion)},
              {"perimeter_functional_web", r.perimeter_functional_web},
              {"perimeter_functional_torsion", r.perimeter_functional_torsion},
              {"inradius_functional_web", r.inradius_functional_web},
              {"inradius_functional_torsion", r.inradius_functional_torsion},
              {"ratio", r.ratio},
              {"checks", std::move(checks)}};
}

inline Json to_json(const Threshold& t) {
  return Json{{"N", t.n}, {"p", t.p}, {"value", t.value}, {"abs_error", t.abs_error}, {"web", t.web},
              {"torsion", to_json(t.tau)}};
}

inline Json to_json(const ConjectureVerdict& v) {
  Json j{{"gamma", v.gamma}, {"threshold", to_json(v.threshold)}, {"certified", v.certified}};
  if (v.fem_comparison) {
    j["fem_comparison"] = Json{{"tau_omega", to_json(v.fem_comparison->tau_omega)},
                               {"tau_regular", to_json(v.fem_comparison->tau_regular)},
                               {"consistent", v.fem_comparison->consistent}};
  } else {
    j["fem_comparison"] = nullptr;
  }
  return j;
}

// ---- CSV -------------------------------------------------------------------

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Comma-separated rows with a header; numbers at full round-trip precision.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  template <class... Cells>
  void row(const Cells&... cells) {
    std::vector<std::string> r;
    (r.push_back(cell(cells)), ...);
    row_strings(r);
  }
  void row_strings(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error(ErrorKind::InvalidArgument, "CSV row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return csv_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "true" : "false"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  std::size_t columns_;
  std::ostringstream out_;
};

}  // namespace torsio::io
