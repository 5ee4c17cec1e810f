// Conforming Delaunay refinement of the cavity PSLG (Bowyer-Watson insertion,
// Ruppert-style encroachment and quality rules).

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>
#include <spdlog/spdlog.h>

#include "cavity/errors.hpp"
#include "cavity/mesh.hpp"

namespace cavity {
namespace {

using boost::multiprecision::cpp_rational;

constexpr double kEps = 1.1102230246251565e-16;
constexpr double kMinAngleDeg = 25.0;
constexpr int kMaxVertices = 4'000'000;

int sign_of(const cpp_rational& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

int orient_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double l = (b.x() - a.x()) * (c.y() - a.y());
  const double r = (b.y() - a.y()) * (c.x() - a.x());
  const double det = l - r;
  const double bound = 3.3306690738754716e-16 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  const cpp_rational ax(a.x()), ay(a.y()), bx(b.x()), by(b.y()), cx(c.x()), cy(c.y());
  return sign_of((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

// Positive when d lies strictly inside the circumcircle of the counter-clockwise (a, b, c).
int incircle_sign(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double bc = bdx * cdy - cdx * bdy;
  const double ca = cdx * ady - adx * cdy;
  const double ab = adx * bdy - bdx * ady;
  const double det = alift * bc + blift * ca + clift * ab;
  const double perm = (std::abs(bdx * cdy) + std::abs(cdx * bdy)) * alift +
                      (std::abs(cdx * ady) + std::abs(adx * cdy)) * blift +
                      (std::abs(adx * bdy) + std::abs(bdx * ady)) * clift;
  const double bound = (10.0 + 96.0 * kEps) * kEps * perm;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  const cpp_rational dx(d.x()), dy(d.y());
  const cpp_rational Ax = cpp_rational(a.x()) - dx, Ay = cpp_rational(a.y()) - dy;
  const cpp_rational Bx = cpp_rational(b.x()) - dx, By = cpp_rational(b.y()) - dy;
  const cpp_rational Cx = cpp_rational(c.x()) - dx, Cy = cpp_rational(c.y()) - dy;
  const cpp_rational e = (Ax * Ax + Ay * Ay) * (Bx * Cy - Cx * By) + (Bx * Bx + By * By) * (Cx * Ay - Ax * Cy) +
                         (Cx * Cx + Cy * Cy) * (Ax * By - Bx * Ay);
  return sign_of(e);
}

enum SourceBits : unsigned {
  kArcRho = 1u,
  kArcR = 2u,
  kGround = 4u,
  kCavity = 8u,
  kObstacle = 16u,
  kMaterial = 32u,
};

struct InputSegment {
  Vec2 a, b;
  unsigned src;
};

struct Pslg {
  std::vector<Vec2> points;
  std::vector<std::array<int, 2>> segments;
  std::vector<unsigned> sources;
};

// Merges duplicate points, inserts crossing points, splits segments at every
// vertex lying on them and merges overlapping pieces.
Pslg clean_pslg(const std::vector<InputSegment>& input, double scale) {
  const double tol = 1e-11 * scale;
  Pslg g;
  auto add_point = [&](const Vec2& p) {
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      if ((g.points[i] - p).norm() <= tol) return int(i);
    }
    g.points.push_back(p);
    return int(g.points.size() - 1);
  };
  for (const auto& s : input) {
    add_point(s.a);
    add_point(s.b);
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    for (std::size_t j = i + 1; j < input.size(); ++j) {
      if (auto x = segment_crossing(input[i].a, input[i].b, input[j].a, input[j].b)) add_point(*x);
    }
  }
  std::map<std::array<int, 2>, unsigned> merged;
  for (const auto& s : input) {
    const Vec2 d = s.b - s.a;
    const double len2 = d.squaredNorm();
    if (len2 <= tol * tol) continue;
    std::vector<std::pair<double, int>> on;
    for (std::size_t k = 0; k < g.points.size(); ++k) {
      const Vec2& p = g.points[k];
      if (point_segment_distance(p, s.a, s.b) > tol) continue;
      on.push_back({(p - s.a).dot(d) / len2, int(k)});
    }
    std::sort(on.begin(), on.end());
    for (std::size_t k = 0; k + 1 < on.size(); ++k) {
      int a = on[k].second, b = on[k + 1].second;
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      merged[{a, b}] |= s.src;
    }
  }
  for (const auto& [seg, src] : merged) {
    g.segments.push_back(seg);
    g.sources.push_back(src);
  }
  return g;
}

struct DomainShape {
  MeshDomain domain;
  Polygon outer;    // half-disc polygon of radius rho (PML) or R (TBC)
  Polygon inner;    // half-disc polygon of radius R
  const Scenario* scenario;

  bool contains(const Vec2& c) const {
    const bool in = point_in_polygon(outer, c) || (!scenario->cavity.empty() && point_in_polygon(scenario->cavity, c));
    if (!in) return false;
    for (const auto& p : scenario->protrusions) {
      if (point_in_polygon(p, c)) return false;
    }
    return true;
  }

  int region(const Vec2& c) const {
    if (domain == MeshDomain::Pml && c.y() > 0.0 && !point_in_polygon(inner, c)) return kPmlRegion;
    return material_at(*scenario, c) + 1;
  }
};

class Triangulator {
 public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbour across the edge opposite v[i]
    bool alive = true;
    signed char inside = -1;  // cached domain membership
    bool done = false;        // quality refinement gave up on this triangle
  };

  Triangulator(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double L = std::max((hi - lo).maxCoeff(), 1e-300);
    pts_.push_back(c + Vec2(-40 * L, -30 * L));
    pts_.push_back(c + Vec2(40 * L, -30 * L));
    pts_.push_back(c + Vec2(0.0, 50 * L));
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}});
    vtri_ = {0, 0, 0};
  }

  const std::vector<Vec2>& points() const { return pts_; }
  std::vector<Tri>& tris() { return tris_; }
  const std::vector<int>& created() const { return created_; }

  // Returns the vertex index (existing one when p duplicates a vertex).
  int insert(const Vec2& p) {
    if (int(pts_.size()) >= kMaxVertices) throw GeometryError("mesher: vertex budget exhausted");
    int t = walk(p);
    for (int k = 0; k < 3; ++k) {
      if (pts_[tris_[t].v[k]] == p) return tris_[t].v[k];
    }
    const int pi = int(pts_.size());
    pts_.push_back(p);
    vtri_.push_back(-1);

    // Cavity of triangles whose circumcircle strictly contains p.
    std::vector<int> cavity{t};
    in_cavity_.resize(tris_.size(), 0);
    in_cavity_[t] = 1;
    for (std::size_t q = 0; q < cavity.size(); ++q) {
      const Tri& tr = tris_[cavity[q]];
      for (int k = 0; k < 3; ++k) {
        const int n = tr.nb[k];
        if (n < 0 || in_cavity_[n]) continue;
        const Tri& tn = tris_[n];
        if (incircle_sign(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], p) > 0) {
          in_cavity_[n] = 1;
          cavity.push_back(n);
        }
      }
    }
    struct Boundary {
      int a, b, outside;
    };
    std::vector<Boundary> boundary;
    for (int c : cavity) {
      const Tri& tr = tris_[c];
      for (int k = 0; k < 3; ++k) {
        const int n = tr.nb[k];
        if (n >= 0 && in_cavity_[n]) continue;
        boundary.push_back({tr.v[(k + 1) % 3], tr.v[(k + 2) % 3], n});
      }
    }
    for (int c : cavity) {
      tris_[c].alive = false;
      in_cavity_[c] = 0;
    }
    created_.clear();
    std::vector<std::pair<int, int>> by_start;  // (a, new triangle)
    for (const auto& e : boundary) {
      const int nt = int(tris_.size());
      Tri tr;
      tr.v = {pi, e.a, e.b};
      tr.nb = {e.outside, -1, -1};
      tris_.push_back(tr);
      in_cavity_.push_back(0);
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int k = 0; k < 3; ++k) {
          if (o.v[(k + 1) % 3] == e.b && o.v[(k + 2) % 3] == e.a) o.nb[k] = nt;
        }
      }
      by_start.push_back({e.a, nt});
      created_.push_back(nt);
      vtri_[e.a] = nt;
      vtri_[e.b] = nt;
    }
    vtri_[pi] = created_.front();
    auto find_start = [&](int a) {
      for (const auto& [s, nt] : by_start) {
        if (s == a) return nt;
      }
      throw GeometryError("mesher: inconsistent cavity boundary");
    };
    for (int nt : created_) {
      Tri& tr = tris_[nt];
      const int other = find_start(tr.v[2]);
      tr.nb[1] = other;
      tris_[other].nb[2] = nt;
    }
    last_ = created_.front();
    return pi;
  }

  bool has_edge(int a, int b, int* apex_left = nullptr, int* apex_right = nullptr) const {
    const int start = vtri_[a];
    int t = start;
    for (int guard = 0; guard < 100000; ++guard) {
      const Tri& tr = tris_[t];
      const int k = local(tr, a);
      const int next = tr.v[(k + 1) % 3];
      const int prev = tr.v[(k + 2) % 3];
      if (next == b || prev == b) {
        const int apex = next == b ? prev : next;
        const int n = tr.nb[next == b ? (k + 2) % 3 : (k + 1) % 3];
        if (apex_left) *apex_left = apex;
        if (apex_right) *apex_right = n >= 0 ? opposite(tris_[n], a, b) : -1;
        return true;
      }
      t = tr.nb[(k + 2) % 3];  // across edge (a, next)
      if (t < 0 || t == start) return false;
    }
    return false;
  }

 private:
  static int local(const Tri& t, int v) {
    for (int k = 0; k < 3; ++k) {
      if (t.v[k] == v) return k;
    }
    throw GeometryError("mesher: vertex not in triangle");
  }

  static int opposite(const Tri& t, int a, int b) {
    for (int k = 0; k < 3; ++k) {
      if (t.v[k] != a && t.v[k] != b) return t.v[k];
    }
    return -1;
  }

  int walk(const Vec2& p) {
    int t = last_;
    if (t < 0 || !tris_[t].alive) {
      t = int(tris_.size()) - 1;
      while (!tris_[t].alive) --t;
    }
    for (std::size_t guard = 0; guard < 4 * tris_.size() + 100; ++guard) {
      const Tri& tr = tris_[t];
      int moved = -1;
      for (int k = 0; k < 3; ++k) {
        const int a = tr.v[(k + 1) % 3], b = tr.v[(k + 2) % 3];
        if (orient_sign(pts_[a], pts_[b], p) < 0) {
          moved = tr.nb[k];
          break;
        }
      }
      if (moved < 0) return t;
      t = moved;
    }
    throw GeometryError("mesher: point location failed");
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vtri_;
  std::vector<char> in_cavity_;
  std::vector<int> created_;
  int last_ = 0;
};

struct Subsegment {
  int a, b;
  unsigned src;
  bool alive = true;
};

bool encroaches(const Vec2& p, const Vec2& a, const Vec2& b) { return (a - p).dot(b - p) <= 0.0; }

}  // namespace

Mesh initial_mesh(const Scenario& s, double target_h, MeshDomain domain) {
  validate(s);
  if (!(target_h > 0.0)) throw ValidationError("target_h > 0");
  const double outer_r = domain == MeshDomain::Pml ? s.rho : s.R;

  std::vector<InputSegment> input;
  auto add_chain = [&](const Polygon& poly, bool closed, unsigned src) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i + (closed ? 0 : 1) < n; ++i) input.push_back({poly[i], poly[(i + 1) % n], src});
  };
  const Polygon outer_arc = semicircle_polyline(outer_r, s.n_arc);
  const Polygon inner_arc = semicircle_polyline(s.R, s.n_arc);
  add_chain(outer_arc, false, domain == MeshDomain::Pml ? kArcRho : kArcR);
  if (domain == MeshDomain::Pml) add_chain(inner_arc, false, kArcR);
  input.push_back({Vec2(-outer_r, 0.0), Vec2(outer_r, 0.0), kGround});
  if (!s.cavity.empty()) add_chain(s.cavity, true, kCavity);
  for (const auto& p : s.protrusions) add_chain(p, true, kObstacle);
  for (const auto& m : s.materials) add_chain(m.region, true, kMaterial);

  double scale = outer_r;
  for (const auto& seg : input) scale = std::max({scale, seg.a.norm(), seg.b.norm()});
  const Pslg g = clean_pslg(input, scale);

  DomainShape shape{domain, outer_arc, inner_arc, &s};

  Vec2 lo = g.points.front(), hi = lo;
  for (const auto& p : g.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Triangulator tri(lo, hi);
  std::vector<int> vid(g.points.size());
  for (std::size_t i = 0; i < g.points.size(); ++i) vid[i] = tri.insert(g.points[i]);

  std::vector<Subsegment> subs;
  for (std::size_t k = 0; k < g.segments.size(); ++k) {
    subs.push_back({vid[g.segments[k][0]], vid[g.segments[k][1]], g.sources[k]});
  }
  const auto& P = tri.points();

  auto needs_split = [&](const Subsegment& sg) {
    int l = -1, r = -1;
    if (!tri.has_edge(sg.a, sg.b, &l, &r)) return true;
    for (int apex : {l, r}) {
      if (apex >= 0 && encroaches(P[apex], P[sg.a], P[sg.b])) return true;
    }
    return false;
  };

  std::deque<int> seg_queue;
  std::vector<char> queued;
  auto enqueue_seg = [&](int k) {
    if (queued.size() < subs.size()) queued.resize(subs.size(), 0);
    if (!queued[k]) {
      queued[k] = 1;
      seg_queue.push_back(k);
    }
  };
  std::deque<int> tri_queue;

  auto after_insert = [&](int v) {
    for (int nt : tri.created()) tri_queue.push_back(nt);
    for (std::size_t k = 0; k < subs.size(); ++k) {
      const auto& sg = subs[k];
      if (!sg.alive || sg.a == v || sg.b == v) continue;
      if (encroaches(P[v], P[sg.a], P[sg.b])) enqueue_seg(int(k));
    }
  };

  auto split = [&](int k) {
    const Subsegment sg = subs[k];
    const Vec2 m = 0.5 * (P[sg.a] + P[sg.b]);
    const int v = tri.insert(m);
    subs[k].alive = false;
    subs.push_back({sg.a, v, sg.src});
    subs.push_back({v, sg.b, sg.src});
    after_insert(v);
    enqueue_seg(int(subs.size()) - 2);
    enqueue_seg(int(subs.size()) - 1);
  };

  auto drain_segments = [&]() {
    while (!seg_queue.empty()) {
      const int k = seg_queue.front();
      seg_queue.pop_front();
      queued[k] = 0;
      if (!subs[k].alive) continue;
      if (needs_split(subs[k])) split(k);
    }
  };

  for (std::size_t k = 0; k < subs.size(); ++k) enqueue_seg(int(k));
  drain_segments();

  auto& T = tri.tris();
  for (std::size_t t = 0; t < T.size(); ++t) {
    if (T[t].alive) tri_queue.push_back(int(t));
  }

  const double sin_min = std::sin(kMinAngleDeg * std::numbers::pi / 180.0);
  while (!tri_queue.empty()) {
    const int t = tri_queue.front();
    tri_queue.pop_front();
    if (!T[t].alive || T[t].done) continue;
    const Vec2 a = P[T[t].v[0]], b = P[T[t].v[1]], c = P[T[t].v[2]];
    if (T[t].inside < 0) T[t].inside = shape.contains((a + b + c) / 3.0) ? 1 : 0;
    if (!T[t].inside) continue;
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double area2 = orient(a, b, c);
    const double circumradius = la * lb * lc / (2.0 * area2);
    const double shortest = std::min({la, lb, lc});
    const double longest = std::max({la, lb, lc});
    // sin(min angle) = shortest / (2 R_circ)
    const bool skinny = shortest / (2.0 * circumradius) < sin_min;
    const bool large = longest > target_h;
    if (!skinny && !large) continue;

    const double d = 2.0 * area2;
    const Vec2 ba = b - a, ca = c - a;
    const Vec2 cc = a + Vec2(ca.y() * ba.squaredNorm() - ba.y() * ca.squaredNorm(),
                             ba.x() * ca.squaredNorm() - ca.x() * ba.squaredNorm()) / d;
    std::vector<int> hit;
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (subs[k].alive && encroaches(cc, P[subs[k].a], P[subs[k].b])) hit.push_back(int(k));
    }
    if (!hit.empty()) {
      for (int k : hit) {
        if (subs[k].alive) split(k);
      }
      drain_segments();
      if (T[t].alive) tri_queue.push_back(t);
      continue;
    }
    if (!shape.contains(cc)) {
      T[t].done = true;
      continue;
    }
    const int v = tri.insert(cc);
    after_insert(v);
    drain_segments();
  }

  // Extract the domain triangles.
  std::unordered_map<std::uint64_t, unsigned> seg_src;
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
  };
  for (const auto& sg : subs) {
    if (sg.alive) seg_src[key(sg.a, sg.b)] |= sg.src;
  }

  Mesh mesh;
  mesh.domain = domain;
  mesh.R = s.R;
  mesh.n_arc = s.n_arc;
  std::vector<int> remap(P.size(), -1);
  std::vector<char> used(P.size(), 0);
  std::vector<int> kept;
  for (std::size_t t = 0; t < T.size(); ++t) {
    if (!T[t].alive) continue;
    const auto& v = T[t].v;
    if (v[0] < 3 || v[1] < 3 || v[2] < 3) continue;
    if (T[t].inside < 0) T[t].inside = shape.contains((P[v[0]] + P[v[1]] + P[v[2]]) / 3.0) ? 1 : 0;
    if (T[t].inside) kept.push_back(int(t));
  }
  for (int t : kept) {
    for (int v : T[t].v) used[v] = 1;
  }
  for (std::size_t v = 0; v < P.size(); ++v) {
    if (used[v]) {
      remap[v] = mesh.num_vertices();
      mesh.vertices.push_back(P[v]);
    }
  }
  std::unordered_map<std::uint64_t, int> side_count;
  for (int t : kept) {
    const auto& v = T[t].v;
    std::array<int, 3> m{remap[v[0]], remap[v[1]], remap[v[2]]};
    // Newest-vertex convention: v0 opposite the longest edge.
    int best = 0;
    double best_len = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double len = (mesh.vertices[m[(i + 1) % 3]] - mesh.vertices[m[(i + 2) % 3]]).norm();
      if (len > best_len + 1e-14 * len) {
        best_len = len;
        best = i;
      }
    }
    std::rotate(m.begin(), m.begin() + best, m.end());
    mesh.triangles.push_back(m);
    mesh.region.push_back(shape.region(mesh.centroid(mesh.num_triangles() - 1)));
    for (int i = 0; i < 3; ++i) ++side_count[key(v[(i + 1) % 3], v[(i + 2) % 3])];
  }

  std::vector<std::pair<std::array<int, 2>, EdgeTag>> tagged;
  for (const auto& [k, count] : side_count) {
    const int a = int(k >> 32), b = int(k & 0xffffffffu);
    const auto it = seg_src.find(k);
    const unsigned src = it == seg_src.end() ? 0u : it->second;
    EdgeTag tag = EdgeTag::Interior;
    if (count == 1) {
      if (src == 0) throw GeometryError("mesher: boundary edge without an input segment");
      if (P[a].y() == 0.0 && P[b].y() == 0.0) {
        tag = EdgeTag::Ground;
      } else if (src & kArcRho) {
        tag = EdgeTag::GammaRho;
      } else if (src & kArcR) {
        tag = EdgeTag::GammaR;
      } else {
        tag = EdgeTag::Wall;
      }
    } else if (src & kArcR) {
      tag = EdgeTag::GammaR;
    }
    if (tag != EdgeTag::Interior) {
      const int ra = remap[a], rb = remap[b];
      tagged.push_back({{std::min(ra, rb), std::max(ra, rb)}, tag});
    }
  }
  std::sort(tagged.begin(), tagged.end());
  mesh.finalize(tagged);
  spdlog::debug("initial mesh: {} vertices, {} triangles, min angle {:.2f} deg", mesh.num_vertices(),
                mesh.num_triangles(), min_angle_deg(mesh));
  return mesh;
}

}  // namespace cavity
