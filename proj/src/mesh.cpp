#include "cavity/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "cavity/errors.hpp"

namespace cavity {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

std::array<int, 2> sorted_pair(int a, int b) { return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a}; }

}  // namespace

const char* to_string(EdgeTag t) {
  switch (t) {
    case EdgeTag::Interior: return "interior";
    case EdgeTag::Ground: return "ground";
    case EdgeTag::Wall: return "wall";
    case EdgeTag::GammaR: return "gamma_R";
    case EdgeTag::GammaRho: return "gamma_rho";
  }
  return "?";
}

double Mesh::area(int t) const {
  const auto& v = triangles[t];
  return 0.5 * orient(vertices[v[0]], vertices[v[1]], vertices[v[2]]);
}

double Mesh::diameter(int t) const {
  const auto& v = triangles[t];
  const Vec2 &a = vertices[v[0]], &b = vertices[v[1]], &c = vertices[v[2]];
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

double Mesh::edge_length(int e) const { return (vertices[edges[e][0]] - vertices[edges[e][1]]).norm(); }

Vec2 Mesh::centroid(int t) const {
  const auto& v = triangles[t];
  return (vertices[v[0]] + vertices[v[1]] + vertices[v[2]]) / 3.0;
}

void Mesh::finalize(const std::vector<std::pair<std::array<int, 2>, EdgeTag>>& tagged) {
  std::unordered_map<std::uint64_t, EdgeTag> tags;
  tags.reserve(tagged.size() * 2);
  for (const auto& [e, tag] : tagged) tags[edge_key(e[0], e[1])] = tag;

  edges.clear();
  edge_tags.clear();
  edge_triangles.clear();
  triangle_edges.assign(triangles.size(), {-1, -1, -1});
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(triangles.size() * 2);
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& v = triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = v[(i + 1) % 3], b = v[(i + 2) % 3];
      const auto key = edge_key(a, b);
      auto [it, inserted] = index.emplace(key, num_edges());
      if (inserted) {
        edges.push_back(sorted_pair(a, b));
        const auto tag_it = tags.find(key);
        edge_tags.push_back(tag_it == tags.end() ? EdgeTag::Interior : tag_it->second);
        edge_triangles.push_back({t, -1});
      } else {
        auto& et = edge_triangles[it->second];
        if (et[1] != -1) throw GeometryError("non-manifold edge: more than two incident triangles");
        et[1] = t;
      }
      triangle_edges[t][i] = it->second;
    }
  }
}

std::vector<std::pair<std::array<int, 2>, EdgeTag>> Mesh::tagged_edges() const {
  std::vector<std::pair<std::array<int, 2>, EdgeTag>> out;
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_tags[e] != EdgeTag::Interior) out.push_back({edges[e], edge_tags[e]});
  }
  return out;
}

// ---------------------------------------------------------------------------

Mesh bisect(const Mesh& mesh, const RefinementMarks& marks) {
  if (marks.marked.empty()) return mesh;

  std::vector<char> edge_marked(mesh.num_edges(), 0);
  std::vector<int> queue;
  auto mark_edge = [&](int e) {
    if (edge_marked[e]) return;
    edge_marked[e] = 1;
    for (int t : mesh.edge_triangles[e]) {
      if (t >= 0) queue.push_back(t);
    }
  };
  for (int t : marks.marked) {
    if (t < 0 || t >= mesh.num_triangles()) throw ValidationError("refinement mark out of range");
    mark_edge(mesh.triangle_edges[t][0]);
  }
  // Closure: a triangle with any marked edge must also split its refinement edge.
  while (!queue.empty()) {
    const int t = queue.back();
    queue.pop_back();
    const auto& te = mesh.triangle_edges[t];
    if (!edge_marked[te[0]] && (edge_marked[te[1]] || edge_marked[te[2]])) mark_edge(te[0]);
  }

  std::unordered_set<std::uint64_t> marked_keys;
  std::unordered_map<std::uint64_t, EdgeTag> tags;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto key = edge_key(mesh.edges[e][0], mesh.edges[e][1]);
    if (edge_marked[e]) marked_keys.insert(key);
    if (mesh.edge_tags[e] != EdgeTag::Interior) tags[key] = mesh.edge_tags[e];
  }

  Mesh out;
  out.domain = mesh.domain;
  out.R = mesh.R;
  out.n_arc = mesh.n_arc;
  out.vertices = mesh.vertices;
  out.triangles.reserve(mesh.triangles.size() * 2);
  out.region.reserve(mesh.triangles.size() * 2);
  std::unordered_map<std::uint64_t, int> midpoint;

  std::vector<std::array<int, 3>> stack;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    stack.push_back(mesh.triangles[t]);
    while (!stack.empty()) {
      const auto tri = stack.back();
      stack.pop_back();
      const int v0 = tri[0], v1 = tri[1], v2 = tri[2];
      const auto key = edge_key(v1, v2);
      if (!marked_keys.count(key)) {
        out.triangles.push_back(tri);
        out.region.push_back(mesh.region[t]);
        continue;
      }
      auto [it, inserted] = midpoint.emplace(key, out.num_vertices());
      if (inserted) {
        out.vertices.push_back(0.5 * (out.vertices[v1] + out.vertices[v2]));
        const auto tag = tags.find(key);
        if (tag != tags.end()) {
          tags[edge_key(v1, it->second)] = tag->second;
          tags[edge_key(it->second, v2)] = tag->second;
        }
      }
      const int m = it->second;
      // Pushed in reverse so the first child is emitted first.
      stack.push_back({m, v2, v0});
      stack.push_back({m, v0, v1});
    }
  }

  std::vector<std::pair<std::array<int, 2>, EdgeTag>> tagged;
  tagged.reserve(tags.size());
  for (const auto& [key, tag] : tags) {
    tagged.push_back({{int(key >> 32), int(key & 0xffffffffu)}, tag});
  }
  out.finalize(tagged);
  return out;
}

// ---------------------------------------------------------------------------

Locator::Locator(const Mesh& mesh) : mesh_(mesh) {
  lo_ = hi_ = mesh.vertices.front();
  for (const auto& v : mesh.vertices) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  const Vec2 span = (hi_ - lo_).cwiseMax(Vec2::Constant(1e-300));
  const double cells = std::max(1.0, std::sqrt(double(mesh.num_triangles())));
  const double aspect = span.x() / span.y();
  nx_ = std::clamp(int(std::ceil(cells * std::sqrt(aspect))), 1, 4096);
  ny_ = std::clamp(int(std::ceil(cells / std::sqrt(aspect))), 1, 4096);
  cell_x_ = span.x() / nx_;
  cell_y_ = span.y() / ny_;
  bins_.assign(std::size_t(nx_) * ny_, {});
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec2 a = mesh.vertices[mesh.triangles[t][0]], b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(mesh.vertices[mesh.triangles[t][k]]);
      b = b.cwiseMax(mesh.vertices[mesh.triangles[t][k]]);
    }
    const int i0 = std::clamp(int((a.x() - lo_.x()) / cell_x_), 0, nx_ - 1);
    const int i1 = std::clamp(int((b.x() - lo_.x()) / cell_x_), 0, nx_ - 1);
    const int j0 = std::clamp(int((a.y() - lo_.y()) / cell_y_), 0, ny_ - 1);
    const int j1 = std::clamp(int((b.y() - lo_.y()) / cell_y_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) bins_[std::size_t(j) * nx_ + i].push_back(t);
    }
  }
}

Locator::Hit Locator::locate(const Vec2& p) const {
  constexpr double tol = 1e-12;
  const int i = int(std::floor((p.x() - lo_.x()) / cell_x_));
  const int j = int(std::floor((p.y() - lo_.y()) / cell_y_));
  int best = -1;
  double best_min = -1e300;
  std::array<double, 3> best_bary{};
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      const int ii = std::clamp(i + di, 0, nx_ - 1);
      const int jj = std::clamp(j + dj, 0, ny_ - 1);
      if ((di != 0 && ii != i + di) || (dj != 0 && jj != j + dj)) continue;
      for (int t : bins_[std::size_t(jj) * nx_ + ii]) {
        const auto& v = mesh_.triangles[t];
        const Vec2 &a = mesh_.vertices[v[0]], &b = mesh_.vertices[v[1]], &c = mesh_.vertices[v[2]];
        const double det = orient(a, b, c);
        std::array<double, 3> l{orient(p, b, c) / det, orient(a, p, c) / det, 0.0};
        l[2] = 1.0 - l[0] - l[1];
        const double mn = std::min({l[0], l[1], l[2]});
        if (mn > best_min) {
          best_min = mn;
          best = t;
          best_bary = l;
        }
      }
      if (best_min >= 0.0) break;
    }
  }
  if (best < 0 || best_min < -tol) {
    throw NotFoundError("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                        ") is outside the mesh");
  }
  return {best, best_bary};
}

Locator::Hit locate(const Mesh& mesh, const Vec2& p) { return Locator(mesh).locate(p); }

// ---------------------------------------------------------------------------

double min_angle_deg(const Mesh& mesh) {
  double mn = 180.0;
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = mesh.vertices[t[(i + 1) % 3]] - mesh.vertices[t[i]];
      const Vec2 b = mesh.vertices[t[(i + 2) % 3]] - mesh.vertices[t[i]];
      const double ang = std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
      mn = std::min(mn, ang * 180.0 / std::numbers::pi);
    }
  }
  return mn;
}

MeshAudit audit(const Mesh& mesh) {
  MeshAudit a;
  std::unordered_map<std::uint64_t, int> count;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double ar = mesh.area(t);
    if (!(ar > 0.0)) a.positively_oriented = false;
    a.total_area += ar;
    const auto& v = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) ++count[edge_key(v[(i + 1) % 3], v[(i + 2) % 3])];
  }
  for (const auto& [key, n] : count) {
    if (n > 2) a.conforming = false;
  }
  // A hanging node shows up as an untagged single-sided edge.
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge_triangles[e][1] < 0 && mesh.edge_tags[e] == EdgeTag::Interior) {
      a.conforming = false;
      a.boundary_tagged = false;
    }
  }
  a.min_angle_deg = min_angle_deg(mesh);
  return a;
}

// ---------------------------------------------------------------------------

void write_vtk(const Mesh& mesh, const std::filesystem::path& path, const VtkArrays& arrays) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\ncavity-scatter mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << " 0\n";
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "CELL_DATA " << mesh.num_triangles() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int r : mesh.region) out << r << '\n';
  for (const auto& [name, data] : arrays.cell_data) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double d : data) out << d << '\n';
  }
  if (!arrays.point_data.empty()) {
    out << "POINT_DATA " << mesh.num_vertices() << '\n';
    for (const auto& [name, data] : arrays.point_data) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double d : data) out << d << '\n';
    }
  }
  if (!out) throw Error("I/O error writing " + path.string());
}

}  // namespace cavity
