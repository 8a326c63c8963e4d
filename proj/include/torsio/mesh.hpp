#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "torsio/detail/predicates.hpp"
#include "torsio/error.hpp"
#include "torsio/offset.hpp"
#include "torsio/polygon.hpp"

namespace torsio {

/// Conforming triangle mesh of a convex polygon.
struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<bool> boundary_flags;
  double h = 0.0;                             // target max edge length

  std::size_t num_nodes() const noexcept { return nodes.size(); }
  std::size_t num_triangles() const noexcept { return triangles.size(); }

  double triangle_area(std::size_t t) const {
    const auto& v = triangles[t];
    return 0.5 * cross(nodes[v[1]] - nodes[v[0]], nodes[v[2]] - nodes[v[0]]);
  }
  double total_area() const {
    double s = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) s += triangle_area(t);
    return s;
  }
  double max_edge() const;
  /// Smallest interior angle over all triangles, in radians.
  double min_angle() const;
};

struct MeshOptions {
  /// Triangles whose circumradius-to-shortest-edge ratio exceeds this bound
  /// are refined. 1/(2 sin 25deg) asks for angles of roughly 25 degrees.
  double max_radius_edge_ratio = 1.0 / (2.0 * std::sin(25.0 * std::numbers::pi / 180.0));
  /// Hard cap on inserted vertices, as a multiple of area / h^2 plus a
  /// boundary allowance.
  double vertex_budget_factor = 40.0;
};

TriMesh triangulate(const ConvexPolygon& poly, double h, const MeshOptions& opt = {});

/// Splits every triangle into four by joining edge midpoints. Boundary
/// midpoints stay on the polygon boundary because every boundary edge is a
/// straight piece of it; angles are preserved exactly. If `parents` is given
/// it receives, for each new node in order, the two nodes it bisects.
TriMesh refine_uniform(const TriMesh& mesh, std::vector<std::array<int, 2>>* parents = nullptr);

/// Throws MeshFailure with a description if any structural invariant fails:
/// positive orientation, tiling of the polygon area, boundary nodes on the
/// boundary, and every edge shared by at most two triangles.
void validate_mesh(const TriMesh& mesh, const ConvexPolygon& poly, double rel_tol = 1e-12);

// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

/// Ruppert-style Delaunay refinement restricted to a convex domain. The hull
/// of the triangulation is always the polygon, so constrained segments are
/// exactly the hull edges.
class DelaunayRefiner {
 public:
  DelaunayRefiner(const ConvexPolygon& poly, double h, const MeshOptions& opt)
      : poly_(poly), h_(h), opt_(opt) {
    const std::size_t n = poly.size();
    corner_angle_ = poly.interior_angles();
    budget_ = static_cast<std::size_t>(opt.vertex_budget_factor * poly.area() / (h * h) +
                                       50.0 * poly.perimeter() / h + 1000.0);
    for (std::size_t i = 0; i < n; ++i) add_vertex(poly.vertex(i), static_cast<int>(i), -1);
  }

  TriMesh run() {
    initial_triangulation();
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) enqueue_triangle(t);
    while (true) {
      if (!segments_.empty()) {
        const SegEntry s = segments_.back();
        segments_.pop_back();
        if (!hull_edge_valid(s)) continue;
        split_segment(s.tri, s.edge);
        continue;
      }
      if (bad_.empty()) break;
      const BadEntry b = bad_.back();
      bad_.pop_back();
      if (!tris_[b.tri].alive || tris_[b.tri].v != b.v) continue;
      refine_triangle(b.tri);
    }
    return extract();
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // n[i] is across the edge opposite v[i]; -1 on the hull
    bool alive = true;
  };
  struct SegEntry {
    int tri, edge;
    int a, b;
  };
  struct BadEntry {
    int tri;
    std::array<int, 3> v;
  };
  struct CavityEdge {
    int a, b, outside;
  };

  const ConvexPolygon& poly_;
  double h_;
  MeshOptions opt_;
  std::vector<double> corner_angle_;
  std::size_t budget_ = 0;

  std::vector<Vec2> pts_;
  std::vector<int> corner_;   // input vertex index or -1
  std::vector<int> segment_;  // polygon edge index for boundary vertices that are not corners
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<unsigned> mark_;
  unsigned stamp_ = 0;
  std::vector<SegEntry> segments_;
  std::vector<BadEntry> bad_;
  std::vector<int> cavity_;
  std::vector<CavityEdge> boundary_;

  int add_vertex(Vec2 p, int corner, int segment) {
    if (pts_.size() >= budget_)
      throw Error(ErrorKind::MeshFailure, "vertex budget exhausted (" + std::to_string(budget_) + ")");
    pts_.push_back(p);
    corner_.push_back(corner);
    segment_.push_back(segment);
    return static_cast<int>(pts_.size()) - 1;
  }

  int new_tri(int a, int b, int c) {
    Tri t{{a, b, c}, {-1, -1, -1}, true};
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      tris_[id] = t;
      return id;
    }
    tris_.push_back(t);
    mark_.push_back(0);
    return static_cast<int>(tris_.size()) - 1;
  }

  // Delaunay triangulation of the convex input vertices: for each chord pick
  // the apex of largest angle, which leaves no other vertex in its circle.
  void initial_triangulation() {
    const int n = static_cast<int>(poly_.size());
    std::vector<std::pair<int, int>> stack{{0, n - 1}};
    while (!stack.empty()) {
      const auto [lo, hi] = stack.back();
      stack.pop_back();
      if (hi - lo < 2) continue;
      int c = lo + 1;
      for (int d = lo + 2; d < hi; ++d)
        if (incircle(pts_[lo], pts_[c], pts_[hi], pts_[d]) > 0) c = d;
      new_tri(lo, c, hi);
      stack.push_back({lo, c});
      stack.push_back({c, hi});
    }
    std::unordered_map<std::uint64_t, std::pair<int, int>> edges;
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
      for (int i = 0; i < 3; ++i) {
        const int a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
        const auto key = edge_key(a, b);
        auto it = edges.find(key);
        if (it == edges.end()) {
          edges.emplace(key, std::make_pair(t, i));
        } else {
          tris_[t].n[i] = it->second.first;
          tris_[it->second.first].n[it->second.second] = t;
        }
      }
    }
  }

  bool hull_edge_valid(const SegEntry& s) const {
    const Tri& t = tris_[s.tri];
    return t.alive && t.n[s.edge] < 0 && t.v[(s.edge + 1) % 3] == s.a && t.v[(s.edge + 2) % 3] == s.b;
  }

  static bool encroaches(Vec2 a, Vec2 b, Vec2 c) { return dot(a - c, b - c) < 0.0; }

  void enqueue_triangle(int t) {
    const Tri& tr = tris_[t];
    for (int i = 0; i < 3; ++i) {
      if (tr.n[i] >= 0) continue;
      const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
      if (encroaches(pts_[a], pts_[b], pts_[tr.v[i]]) || norm(pts_[b] - pts_[a]) > h_)
        segments_.push_back({t, i, a, b});
    }
    if (is_bad(t)) bad_.push_back({t, tr.v});
  }

  // Polygon edges a vertex lies on.
  std::array<int, 2> segments_of(int v) const {
    const int n = static_cast<int>(poly_.size());
    if (corner_[v] >= 0) return {(corner_[v] + n - 1) % n, corner_[v]};
    return {segment_[v], -1};
  }

  // Shortest edge joins two boundary vertices on edges that meet at a small
  // input angle: refining such a triangle cannot improve it.
  bool shielded_by_small_angle(int u, int w) const {
    const int n = static_cast<int>(poly_.size());
    const auto su = segments_of(u), sw = segments_of(w);
    for (int s : su) {
      if (s < 0) continue;
      for (int r : sw) {
        if (r < 0 || r == s) continue;
        int shared = -1;
        if ((s + 1) % n == r) shared = r;
        if ((r + 1) % n == s) shared = s;
        if (shared >= 0 && corner_angle_[shared] < std::numbers::pi / 3.0 + 1e-12) return true;
      }
    }
    return false;
  }

  bool on_boundary(int v) const { return corner_[v] >= 0 || segment_[v] >= 0; }

  bool is_bad(int t) const {
    const auto& v = tris_[t].v;
    const Vec2 a = pts_[v[0]], b = pts_[v[1]], c = pts_[v[2]];
    const double la = norm2(b - c), lb = norm2(c - a), lc = norm2(a - b);
    const double lmax = std::max({la, lb, lc});
    if (lmax > h_ * h_) return true;
    double lmin = la;
    int i0 = 1, i1 = 2;
    if (lb < lmin) lmin = lb, i0 = 2, i1 = 0;
    if (lc < lmin) lmin = lc, i0 = 0, i1 = 1;
    const double area2 = std::abs(cross(b - a, c - a));
    // (R / lmin)^2 with R = abc / (2 area2)
    const double ratio2 = la * lb * lc / (4.0 * area2 * area2 * lmin);
    const double bound = opt_.max_radius_edge_ratio;
    if (ratio2 <= bound * bound) return false;
    const int u = v[i0], w = v[i1];
    if (on_boundary(u) && on_boundary(w) && shielded_by_small_angle(u, w)) return false;
    return true;
  }

  // Visibility walk. Returns the triangle containing p, or -1 and the hull
  // edge through which p left the domain.
  int locate(Vec2 p, int start, int& exit_tri, int& exit_edge) const {
    int t = start;
    const std::size_t cap = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tri& tr = tris_[t];
      int next = -2;
      for (int k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + step) % 3);
        if (orient2d(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p) < 0) {
          next = tr.n[i];
          if (next < 0) {
            exit_tri = t;
            exit_edge = i;
            return -1;
          }
          break;
        }
      }
      if (next == -2) return t;
      t = next;
    }
    throw Error(ErrorKind::MeshFailure, "point location did not terminate");
  }

  // Collects the Bowyer-Watson cavity of p seeded at `seed` (always included).
  void build_cavity(Vec2 p, int seed) {
    ++stamp_;
    cavity_.clear();
    boundary_.clear();
    cavity_.push_back(seed);
    mark_[seed] = stamp_;
    for (std::size_t k = 0; k < cavity_.size(); ++k) {
      const int t = cavity_[k];
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].n[i];
        if (nb >= 0 && mark_[nb] == stamp_) continue;
        if (nb < 0) continue;
        const auto& w = tris_[nb].v;
        if (incircle(pts_[w[0]], pts_[w[1]], pts_[w[2]], p) > 0) {
          mark_[nb] = stamp_;
          cavity_.push_back(nb);
        }
      }
    }
    for (int t : cavity_)
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].n[i];
        if (nb >= 0 && mark_[nb] == stamp_) continue;
        boundary_.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
      }
  }

  // Replaces the current cavity by a fan around vertex `pv`. The hull edge
  // (split_a, split_b), if given, is the one `pv` subdivides.
  void commit(int pv, int split_a = -1, int split_b = -1) {
    const Vec2 p = pts_[pv];
    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    std::unordered_map<int, int> starts, ends;
    std::vector<int> created;
    created.reserve(boundary_.size());
    for (const CavityEdge& e : boundary_) {
      if (e.a == split_a && e.b == split_b) continue;
      if (orient2d(pts_[e.a], pts_[e.b], p) <= 0)
        throw Error(ErrorKind::MeshFailure, "cavity is not star-shaped from the inserted point");
      const int t = new_tri(e.a, e.b, pv);
      tris_[t].n[2] = e.outside;
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int i = 0; i < 3; ++i)
          if (o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a) o.n[i] = t;
      }
      starts[e.a] = t;
      ends[e.b] = t;
      created.push_back(t);
    }
    for (int t : created) {
      Tri& tr = tris_[t];
      auto s = starts.find(tr.v[1]);
      tr.n[0] = s == starts.end() ? -1 : s->second;
      auto e = ends.find(tr.v[0]);
      tr.n[1] = e == ends.end() ? -1 : e->second;
    }
    for (int t : created) enqueue_triangle(t);
  }

  Vec2 split_point(int a, int b) const {
    const Vec2 pa = pts_[a], pb = pts_[b];
    const bool ca = corner_[a] >= 0, cb = corner_[b] >= 0;
    if (ca == cb) return 0.5 * (pa + pb);
    // Concentric shells around the corner: split at a power-of-two distance
    // so that segments meeting at a small angle split in step.
    const Vec2 from = ca ? pa : pb, to = ca ? pb : pa;
    const double len = norm(to - from);
    double d = std::exp2(std::round(std::log2(0.5 * len)));
    if (d < len / 3.0) d *= 2.0;
    if (d > 2.0 * len / 3.0) d *= 0.5;
    return from + (d / len) * (to - from);
  }

  int segment_index(int a, int b) const {
    const int n = static_cast<int>(poly_.size());
    if (segment_[a] >= 0) return segment_[a];
    if (segment_[b] >= 0) return segment_[b];
    const int ia = corner_[a], ib = corner_[b];
    return (ia + 1) % n == ib ? ia : ib;
  }

  void split_segment(int t, int edge) {
    const int a = tris_[t].v[(edge + 1) % 3], b = tris_[t].v[(edge + 2) % 3];
    const Vec2 p = split_point(a, b);
    const int pv = add_vertex(p, -1, segment_index(a, b));
    build_cavity(p, t);
    commit(pv, a, b);
  }

  void refine_triangle(int t) {
    const auto& v = tris_[t].v;
    const Vec2 c = circumcenter(pts_[v[0]], pts_[v[1]], pts_[v[2]]);
    int exit_tri = -1, exit_edge = -1;
    const int host = locate(c, t, exit_tri, exit_edge);
    if (host < 0) {
      segments_.push_back({exit_tri, exit_edge, tris_[exit_tri].v[(exit_edge + 1) % 3],
                           tris_[exit_tri].v[(exit_edge + 2) % 3]});
      bad_.push_back({t, tris_[t].v});
      return;
    }
    for (int i = 0; i < 3; ++i)
      if (pts_[tris_[host].v[i]] == c) return;
    build_cavity(c, host);
    bool encroached = false;
    for (int k : cavity_) {
      const Tri& tr = tris_[k];
      for (int i = 0; i < 3; ++i) {
        if (tr.n[i] >= 0) continue;
        const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        if (encroaches(pts_[a], pts_[b], c)) {
          segments_.push_back({k, i, a, b});
          encroached = true;
        }
      }
    }
    if (encroached) {
      bad_.push_back({t, tris_[t].v});
      return;
    }
    const int pv = add_vertex(c, -1, -1);
    commit(pv);
  }

  TriMesh extract() const {
    TriMesh m;
    m.h = h_;
    m.nodes = pts_;
    m.boundary_flags.resize(pts_.size());
    for (std::size_t i = 0; i < pts_.size(); ++i) m.boundary_flags[i] = on_boundary(static_cast<int>(i));
    for (const Tri& t : tris_)
      if (t.alive) m.triangles.push_back(t.v);
    return m;
  }
};

}  // namespace detail

inline double TriMesh::max_edge() const {
  double m = 0.0;
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i) m = std::max(m, norm(nodes[t[(i + 1) % 3]] - nodes[t[i]]));
  return m;
}

inline double TriMesh::min_angle() const {
  double m = std::numbers::pi;
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = nodes[t[i]], b = nodes[t[(i + 1) % 3]], c = nodes[t[(i + 2) % 3]];
      m = std::min(m, std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a)));
    }
  return m;
}

inline TriMesh triangulate(const ConvexPolygon& poly, double h, const MeshOptions& opt) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::InvalidArgument, "mesh size must be positive and finite");
  const double r = inradius(poly);
  if (!(h < r))
    throw Error(ErrorKind::InvalidArgument,
                "mesh size " + std::to_string(h) + " must be below the inradius " + std::to_string(r));
  return detail::DelaunayRefiner(poly, h, opt).run();
}

inline TriMesh refine_uniform(const TriMesh& mesh, std::vector<std::array<int, 2>>* parents) {
  TriMesh out;
  out.h = 0.5 * mesh.h;
  out.nodes = mesh.nodes;
  out.boundary_flags = mesh.boundary_flags;
  if (parents) parents->clear();
  std::unordered_map<std::uint64_t, int> mid;
  mid.reserve(3 * mesh.triangles.size());
  // An edge is on the boundary iff it belongs to a single triangle.
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(3 * mesh.triangles.size());
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) ++count[detail::edge_key(t[i], t[(i + 1) % 3])];
  auto midpoint = [&](int a, int b) {
    const auto key = detail::edge_key(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    out.boundary_flags.push_back(count[key] == 1);
    if (parents) parents->push_back({a, b});
    mid.emplace(key, id);
    return id;
  };
  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  return out;
}

inline void validate_mesh(const TriMesh& mesh, const ConvexPolygon& poly, double rel_tol) {
  const double scale = poly.bbox_diagonal();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& v = mesh.triangles[t];
    if (detail::orient2d(mesh.nodes[v[0]], mesh.nodes[v[1]], mesh.nodes[v[2]]) <= 0)
      throw Error(ErrorKind::MeshFailure, "triangle " + std::to_string(t) + " is not positively oriented");
  }
  const double a = mesh.total_area(), pa = poly.area();
  if (std::abs(a - pa) > rel_tol * 10.0 * pa)
    throw Error(ErrorKind::MeshFailure, "element areas sum to " + std::to_string(a) + ", polygon area " +
                                            std::to_string(pa));
  std::unordered_map<std::uint64_t, int> count;
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) ++count[detail::edge_key(t[i], t[(i + 1) % 3])];
  for (const auto& [key, c] : count) {
    if (c > 2) throw Error(ErrorKind::MeshFailure, "edge shared by more than two triangles");
    if (c != 1) continue;
    const int a0 = static_cast<int>(key >> 32), b0 = static_cast<int>(key & 0xffffffffu);
    if (!mesh.boundary_flags[a0] || !mesh.boundary_flags[b0])
      throw Error(ErrorKind::MeshFailure, "boundary edge with an unflagged node");
  }
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < poly.size(); ++e)
      dmin = std::min(dmin, poly.edge_line(e).signed_distance(mesh.nodes[i]));
    if (dmin < -rel_tol * 1e3 * scale)
      throw Error(ErrorKind::MeshFailure, "node " + std::to_string(i) + " lies outside the polygon");
    if (mesh.boundary_flags[i] && std::abs(dmin) > rel_tol * 1e3 * scale)
      throw Error(ErrorKind::MeshFailure, "boundary node " + std::to_string(i) + " is off the boundary");
  }
}

}  // namespace torsio
