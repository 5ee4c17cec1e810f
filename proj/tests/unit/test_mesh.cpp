#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "cavity/errors.hpp"
#include "cavity/mesh.hpp"
#include "test_support.hpp"

using namespace cavity;

namespace {

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) a += m.area(t);
  return a;
}

Mesh example1_mesh(MeshDomain d = MeshDomain::Pml) {
  const Scenario s = preset("example1_lossy");
  return initial_mesh(s, s.wavelength() / 4, d);
}

}  // namespace

TEST_CASE("initial mesh tagging") {
  const Mesh m = example1_mesh();
  const MeshAudit a = audit(m);
  CHECK(a.conforming);
  CHECK(a.positively_oriented);
  CHECK(a.boundary_tagged);
  CHECK(a.min_angle_deg >= 20.0);
  for (int e = 0; e < m.num_edges(); ++e) {
    const bool boundary = m.edge_triangles[e][1] < 0;
    CHECK((m.edge_tags[e] != EdgeTag::Interior) == (boundary || m.edge_tags[e] == EdgeTag::GammaR));
    if (m.edge_tags[e] == EdgeTag::Ground) {
      CHECK(m.vertices[m.edges[e][0]].y() == 0.0);
      CHECK(m.vertices[m.edges[e][1]].y() == 0.0);
    }
  }
}

TEST_CASE("every triangle lies on one side of Gamma_R") {
  const Mesh m = example1_mesh();
  const Scenario s = preset("example1_lossy");
  const Polygon inner = half_disc_polygon(s.R, m.n_arc);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Vec2 c = m.centroid(t);
    if (c.y() < 0.0) continue;
    CHECK(m.is_pml(t) != point_in_polygon(inner, c));
  }
}

TEST_CASE("tbc domain stays inside the half disc") {
  const Mesh m = example1_mesh(MeshDomain::Tbc);
  const Scenario s = preset("example1_lossy");
  for (int t = 0; t < m.num_triangles(); ++t) {
    // The cavity itself may reach beyond R below the ground line.
    if (m.centroid(t).y() > 0.0) CHECK(m.centroid(t).norm() <= s.R);
    CHECK(!m.is_pml(t));
  }
  int gamma_r = 0;
  for (auto tag : m.edge_tags) gamma_r += tag == EdgeTag::GammaR;
  CHECK(gamma_r == m.n_arc);
}

TEST_CASE("empty marks leave the mesh unchanged") {
  const Mesh m = example1_mesh();
  const Mesh r = bisect(m, {});
  CHECK(r.num_triangles() == m.num_triangles());
  CHECK(r.num_vertices() == m.num_vertices());
}

TEST_CASE("closure bisects the neighbour across the refinement edge") {
  const Mesh m = testing::square_mesh(2);
  const Mesh r = bisect(m, {{0}});
  CHECK(r.num_triangles() == 4);
  CHECK(r.num_vertices() == 5);
  CHECK(audit(r).conforming);
}

TEST_CASE("two uniform bisections halve every original edge") {
  const Mesh m = testing::square_mesh(2);
  RefinementMarks all;
  for (int t = 0; t < m.num_triangles(); ++t) all.marked.push_back(t);
  Mesh r = bisect(m, all);
  all.marked.clear();
  for (int t = 0; t < r.num_triangles(); ++t) all.marked.push_back(t);
  r = bisect(r, all);
  CHECK(r.num_triangles() == 8);
  double max_len = 0.0;
  for (int e = 0; e < r.num_edges(); ++e) max_len = std::max(max_len, r.edge_length(e));
  CHECK(max_len == doctest::Approx(std::sqrt(2.0) / 2));
  // Right isosceles triangles bisect into similar copies.
  CHECK(min_angle_deg(r) == doctest::Approx(45.0));
}

TEST_CASE("locate") {
  const Mesh m = example1_mesh();
  const Locator loc(m);
  for (int t : {0, m.num_triangles() / 2, m.num_triangles() - 1}) {
    const auto hit = loc.locate(m.centroid(t));
    CHECK(hit.triangle == t);
    for (double b : hit.barycentric) CHECK(b == doctest::Approx(1.0 / 3));
  }
  const int v = m.triangles[3][1];
  const auto hit = loc.locate(m.vertices[v]);
  double maxb = 0.0;
  for (double b : hit.barycentric) maxb = std::max(maxb, b);
  CHECK(maxb == doctest::Approx(1.0));
  CHECK_THROWS_AS(loc.locate(Vec2(0.0, 10.0)), NotFoundError);
  CHECK_THROWS_AS(loc.locate(Vec2(0.0, -1.0)), NotFoundError);
}

TEST_CASE("random marking preserves conformity, area and angles") {
  Mesh m = example1_mesh();
  const double area0 = total_area(m);
  const double angle0 = min_angle_deg(m);
  std::mt19937 rng(7);
  for (int round = 0; round < 10; ++round) {
    RefinementMarks marks;
    std::bernoulli_distribution pick(0.15);
    for (int t = 0; t < m.num_triangles(); ++t)
      if (pick(rng)) marks.marked.push_back(t);
    m = bisect(m, marks);
    const MeshAudit a = audit(m);
    REQUIRE(a.conforming);
    REQUIRE(a.positively_oriented);
    REQUIRE(a.boundary_tagged);
    CHECK(std::abs(a.total_area - area0) <= 1e-12 * area0);
    CHECK(a.min_angle_deg >= 0.5 * angle0);
  }
}

TEST_CASE("vtk writer") {
  const Mesh m = testing::square_mesh(2);
  const auto path = std::filesystem::temp_directory_path() / "cavity_mesh_test.vtk";
  write_vtk(m, path, {{{"x", {1, 2, 3, 4}}}, {{"c", {5, 6}}}});
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(text.find("POINTS 4") != std::string::npos);
  CHECK(text.find("CELLS 2 8") != std::string::npos);
  CHECK(text.find("POINT_DATA 4") != std::string::npos);
  CHECK(text.find("CELL_DATA 2") != std::string::npos);
  std::filesystem::remove(path);
}
