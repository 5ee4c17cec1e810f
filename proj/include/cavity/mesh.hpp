#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "cavity/geometry.hpp"
#include "cavity/scenario.hpp"

namespace cavity {

enum class EdgeTag : std::uint8_t { Interior, Ground, Wall, GammaR, GammaRho };

const char* to_string(EdgeTag t);

enum class MeshDomain { Pml, Tbc };

/// Region label of PML elements; 0 is background, k >= 1 is materials[k-1].
inline constexpr int kPmlRegion = -1;

class Locator;

/// Triangles are stored (v0, v1, v2) counter-clockwise with v0 the newest vertex:
/// the refinement edge is (v1, v2).
struct Mesh {
  MeshDomain domain = MeshDomain::Pml;
  double R = 0.0;
  int n_arc = 0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> region;

  // Derived topology, rebuilt by finalize().
  std::vector<std::array<int, 2>> edges;
  std::vector<EdgeTag> edge_tags;
  std::vector<std::array<int, 2>> edge_triangles;  // second entry -1 on the boundary
  std::vector<std::array<int, 3>> triangle_edges;  // local edge i is opposite vertex i

  int num_vertices() const { return int(vertices.size()); }
  int num_triangles() const { return int(triangles.size()); }
  int num_edges() const { return int(edges.size()); }

  double area(int t) const;
  double diameter(int t) const;
  double edge_length(int e) const;
  Vec2 centroid(int t) const;
  bool is_pml(int t) const { return region[t] == kPmlRegion; }

  /// Rebuilds edges and edge incidence; tags come from a lookup of tagged vertex pairs.
  void finalize(const std::vector<std::pair<std::array<int, 2>, EdgeTag>>& tagged);

  /// The (sorted vertex pair, tag) list of all non-interior edges.
  std::vector<std::pair<std::array<int, 2>, EdgeTag>> tagged_edges() const;
};

struct RefinementMarks {
  std::vector<int> marked;
};

/// Newest-vertex bisection with conformity closure.
Mesh bisect(const Mesh& mesh, const RefinementMarks& marks);

/// Conforming Delaunay triangulation of the PML domain (B_rho^+ u D) or the TBC domain (B_R^+ u D).
Mesh initial_mesh(const Scenario& s, double target_h, MeshDomain domain);

/// Uniform grid bucketing of triangles for point location.
class Locator {
 public:
  explicit Locator(const Mesh& mesh);

  struct Hit {
    int triangle;
    std::array<double, 3> barycentric;
  };

  /// Throws NotFoundError for points outside the mesh (relative tolerance 1e-12).
  Hit locate(const Vec2& p) const;

 private:
  const Mesh& mesh_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  double cell_x_ = 1.0, cell_y_ = 1.0;
  std::vector<std::vector<int>> bins_;
};

Locator::Hit locate(const Mesh& mesh, const Vec2& p);

struct MeshAudit {
  bool conforming = true;
  bool positively_oriented = true;
  bool boundary_tagged = true;
  double total_area = 0.0;
  double min_angle_deg = 180.0;
};

MeshAudit audit(const Mesh& mesh);

double min_angle_deg(const Mesh& mesh);

/// VTK legacy ASCII, with optional point and cell arrays.
struct VtkArrays {
  std::vector<std::pair<std::string, std::vector<double>>> point_data;
  std::vector<std::pair<std::string, std::vector<double>>> cell_data;
};

void write_vtk(const Mesh& mesh, const std::filesystem::path& path, const VtkArrays& arrays = {});

}  // namespace cavity
