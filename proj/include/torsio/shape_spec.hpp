#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "torsio/error.hpp"
#include "torsio/polygon.hpp"
#include "torsio/shapes.hpp"

namespace torsio {

struct ShapeSpec;

namespace spec {
struct Regular {
  int n;
  double area;
};
struct IsoscelesT {
  double k;
};
struct RectangleStrip {
  double ell;
};
struct Stadium {
  std::shared_ptr<const ShapeSpec> core;
  double ell;
};
struct Circumscribed {
  std::vector<double> angles;
  double r;
};
struct RandomConvex {
  int n;
  std::uint64_t seed;
};
struct File {
  std::string path;
};
}  // namespace spec

/// Declarative description of a test shape.
struct ShapeSpec {
  std::variant<spec::Regular, spec::IsoscelesT, spec::RectangleStrip, spec::Stadium, spec::Circumscribed,
               spec::RandomConvex, spec::File>
      family;
};

/// Grammar:
///   regular:N:area | isoT:k | rect:ell | stadium:<core>:ell | file:<path>
///   | random:n:seed | circ:R:a1,a2,...
/// The stadium core is a nested spec when it starts with a family keyword,
/// otherwise a polygon file path. Angles for `circ` are in radians.
ShapeSpec parse_shape(std::string_view text);

/// Canonical text form; parse_shape(format_shape(s)) reproduces s.
std::string format_shape(const ShapeSpec& s);

// ---------------------------------------------------------------------------

namespace detail {

class SpecParser {
 public:
  SpecParser(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  ShapeSpec parse() {
    const std::size_t colon = text_.find(':');
    if (colon == std::string_view::npos) fail(text_.size(), "expected '<family>:' prefix");
    const std::string_view fam = text_.substr(0, colon);
    pos_ = colon + 1;
    if (fam == "regular") {
      const double n = number(field(), "N");
      if (n != std::floor(n)) fail(mark_, "N must be an integer");
      if (n < 3) range("regular polygon needs N >= 3");
      if (n > 1e6) range("N too large");
      const double a = number(last(), "area");
      if (!(a > 0.0)) range("area must be positive");
      return {spec::Regular{static_cast<int>(n), a}};
    }
    if (fam == "isoT") {
      const double k = number(last(), "k");
      if (!(k > 0.0)) range("k must be positive");
      return {spec::IsoscelesT{k}};
    }
    if (fam == "rect") {
      const double l = number(last(), "ell");
      if (!(l > 0.0)) range("ell must be positive");
      return {spec::RectangleStrip{l}};
    }
    if (fam == "random") {
      const double n = number(field(), "n");
      if (n != std::floor(n)) fail(mark_, "n must be an integer");
      if (n < 3) range("random polygon needs n >= 3");
      if (n > 1e7) range("n too large");
      const std::string_view s = last();
      std::uint64_t seed = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc() || p != s.data() + s.size() || s.empty()) fail(mark_, "seed must be a nonnegative integer");
      return {spec::RandomConvex{static_cast<int>(n), seed}};
    }
    if (fam == "file") {
      const std::string_view path = text_.substr(pos_);
      if (path.empty()) fail(pos_, "empty path");
      return {spec::File{std::string(path)}};
    }
    if (fam == "stadium") {
      const std::size_t split = text_.rfind(':');
      if (split < pos_ || split == std::string_view::npos) fail(text_.size(), "expected 'stadium:<core>:ell'");
      const std::string_view core = text_.substr(pos_, split - pos_);
      if (core.empty()) fail(pos_, "empty stadium core");
      const std::size_t core_pos = pos_;
      pos_ = split + 1;
      const double l = number(last(), "ell");
      if (!(l >= 0.0)) range("ell must be nonnegative");
      ShapeSpec inner = nested(core) ? SpecParser(core, base_ + core_pos).parse()
                                     : ShapeSpec{spec::File{std::string(core)}};
      return {spec::Stadium{std::make_shared<const ShapeSpec>(std::move(inner)), l}};
    }
    if (fam == "circ") {
      const double r = number(field(), "R");
      if (!(r > 0.0)) range("R must be positive");
      std::vector<double> angles;
      while (true) {
        const std::size_t comma = text_.find(',', pos_);
        const std::size_t end = comma == std::string_view::npos ? text_.size() : comma;
        mark_ = pos_;
        angles.push_back(number(text_.substr(pos_, end - pos_), "angle"));
        if (comma == std::string_view::npos) break;
        pos_ = comma + 1;
      }
      if (angles.size() < 3) range("circumscribed polygon needs at least 3 tangent angles");
      return {spec::Circumscribed{std::move(angles), r}};
    }
    fail(0, "unknown shape family '" + std::string(fam) + "'");
  }

 private:
  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::size_t mark_ = 0;

  static bool nested(std::string_view s) {
    for (std::string_view f : {"regular:", "isoT:", "rect:", "stadium:", "file:", "random:", "circ:"})
      if (s.substr(0, f.size()) == f) return true;
    return false;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& what) const { throw ParseError(base_ + at, what); }
  [[noreturn]] void range(const std::string& what) const { throw Error(ErrorKind::RangeError, what); }

  std::string_view field() {
    const std::size_t colon = text_.find(':', pos_);
    if (colon == std::string_view::npos) fail(text_.size(), "expected ':'");
    mark_ = pos_;
    const std::string_view f = text_.substr(pos_, colon - pos_);
    pos_ = colon + 1;
    return f;
  }
  std::string_view last() {
    mark_ = pos_;
    const std::string_view f = text_.substr(pos_);
    if (f.find(':') != std::string_view::npos) fail(pos_ + f.find(':'), "unexpected ':'");
    pos_ = text_.size();
    return f;
  }
  double number(std::string_view s, const char* what) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
      fail(mark_ + (ec == std::errc() ? static_cast<std::size_t>(p - s.data()) : 0),
           std::string("invalid number for ") + what);
    if (!std::isfinite(v)) throw Error(ErrorKind::RangeError, std::string(what) + " must be finite");
    return v;
  }
};

inline std::string fmt_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace detail

inline ShapeSpec parse_shape(std::string_view text) { return detail::SpecParser(text, 0).parse(); }

inline std::string format_shape(const ShapeSpec& s) {
  using detail::fmt_double;
  struct Visitor {
    std::string operator()(const spec::Regular& r) const {
      return "regular:" + std::to_string(r.n) + ":" + fmt_double(r.area);
    }
    std::string operator()(const spec::IsoscelesT& t) const { return "isoT:" + fmt_double(t.k); }
    std::string operator()(const spec::RectangleStrip& r) const { return "rect:" + fmt_double(r.ell); }
    std::string operator()(const spec::Stadium& s) const {
      const std::string core =
          std::holds_alternative<spec::File>(s.core->family) ? std::get<spec::File>(s.core->family).path
                                                             : format_shape(*s.core);
      return "stadium:" + core + ":" + fmt_double(s.ell);
    }
    std::string operator()(const spec::Circumscribed& c) const {
      std::string out = "circ:" + fmt_double(c.r) + ":";
      for (std::size_t i = 0; i < c.angles.size(); ++i) out += (i ? "," : "") + fmt_double(c.angles[i]);
      return out;
    }
    std::string operator()(const spec::RandomConvex& r) const {
      return "random:" + std::to_string(r.n) + ":" + std::to_string(r.seed);
    }
    std::string operator()(const spec::File& f) const { return "file:" + f.path; }
  };
  return std::visit(Visitor{}, s.family);
}

}  // namespace torsio
