#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "cavity/adapt.hpp"
#include "cavity/errors.hpp"
#include "cavity/estimator.hpp"
#include "test_support.hpp"

using namespace cavity;
using std::numbers::pi;

namespace {

SolutionField field_on(const Mesh& m, const Scenario& s, const std::function<cplx(const Vec2&)>& u) {
  SolutionField f{std::make_shared<const Mesh>(m), build_dofmap(m, s), {}};
  f.values.resize(f.dofmap.num_dofs);
  for (int i = 0; i < f.dofmap.num_dofs; ++i) f.values[i] = u(f.dofmap.coords[i]);
  return f;
}

int shared_edge(const Mesh& m) {
  for (int e = 0; e < m.num_edges(); ++e)
    if (m.edge_tags[e] == EdgeTag::Interior) return e;
  return -1;
}

}  // namespace

TEST_CASE("zero field in the physical domain has zero residual and indicator") {
  const Mesh m = testing::square_mesh(2);
  const Scenario s = testing::plain_scenario(Polarization::TM, 3.0);
  const auto f = field_on(m, s, [](const Vec2&) { return cplx(0); });
  for (int t = 0; t < 2; ++t) {
    for (cplx r : element_residual(f, s, t)) CHECK(r == cplx(0));
    CHECK(eta_K(f, s, t) == 0.0);
  }
  const auto rep = global_estimate(f, s);
  CHECK(rep.eps_h == 0.0);
  CHECK(rep.eps_pml == 0.0);
}

TEST_CASE("P1 residual is kappa^2 u") {
  const Mesh m = testing::square_mesh(2);
  const Scenario s = testing::plain_scenario(Polarization::TM, 3.0);
  const auto f = field_on(m, s, [](const Vec2& x) { return cplx(1 + x.x(), 2 * x.y()); });
  for (const std::array<double, 3> l : {std::array<double, 3>{0.2, 0.3, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}) {
    const ElementGeometry g(m, 0);
    const cplx u = f.eval(g, 0, l).value;
    CHECK(std::abs(element_residual(f, s, 0, l) - 9.0 * u) < 1e-13);
  }
}

TEST_CASE("jumps: linear field and a kinked field") {
  const Mesh m = testing::square_mesh(2);
  const Scenario s = testing::plain_scenario(Polarization::TM, 1.0);
  const int e = shared_edge(m);
  REQUIRE(e >= 0);
  const auto lin = field_on(m, s, [](const Vec2& x) { return cplx(2 * x.x() - x.y(), 0.5); });
  CHECK(std::abs(edge_jump(lin, s, e, 0.3)) < 1e-13);

  // Two triangles split by the vertical line x = 0.
  Mesh k;
  k.R = 10;
  k.n_arc = 8;
  k.vertices = {Vec2(-1, 0), Vec2(0, 0), Vec2(0, 1), Vec2(1, 0.5)};
  k.triangles = {{0, 1, 2}, {3, 2, 1}};
  k.region = {0, 0};
  k.finalize({{{0, 1}, EdgeTag::Ground}, {{0, 2}, EdgeTag::Ground}, {{1, 3}, EdgeTag::Ground}, {{2, 3}, EdgeTag::Ground}});
  // u = x + 1 on the left triangle (gradient (1,0)), constant 1 on the right one.
  const auto kink = field_on(k, s, [](const Vec2& x) { return x.x() > 0.5 ? cplx(1) : cplx(1 + std::min(x.x(), 0.0)); });
  const int ke = shared_edge(k);
  REQUIRE(ke >= 0);
  // K1 is the triangle with outward normal (1, 0) on the shared edge.
  CHECK(std::abs(edge_jump(kink, s, ke, 0.5) - cplx(-1)) < 1e-13);
}

TEST_CASE("TE ground edges carry twice the conormal flux") {
  const Mesh m = testing::square_mesh(1, EdgeTag::Ground);
  const Scenario s = testing::plain_scenario(Polarization::TE, 2.0);
  const auto f = field_on(m, s, [](const Vec2& x) { return cplx(0.5 * x.x() + 3 * x.y(), 0); });
  int bottom = -1;
  for (int e = 0; e < m.num_edges(); ++e)
    if (m.vertices[m.edges[e][0]].y() == 0 && m.vertices[m.edges[e][1]].y() == 0) bottom = e;
  REQUIRE(bottom >= 0);
  CHECK(in_edge_set(m, Polarization::TE, bottom));
  CHECK(!in_edge_set(m, Polarization::TM, bottom));
  // Outward normal (0, -1): flux kappa^-2 grad u . nu = -3 / 4.
  CHECK(std::abs(edge_jump(f, s, bottom, 0.4) - cplx(2 * -0.75)) < 1e-13);
  Scenario tm = s;
  tm.polarization = Polarization::TM;
  CHECK_THROWS_AS(edge_jump(f, tm, bottom, 0.4), ValidationError);
}

TEST_CASE("indicator is homogeneous in the field away from u^ref") {
  const Mesh m = testing::square_mesh(2);
  const Scenario s = testing::plain_scenario(Polarization::TM, 3.0);
  const auto f = field_on(m, s, [](const Vec2& x) { return cplx(x.x() * x.y(), 1 - x.x()); });
  auto g = f;
  g.values *= 2.0;
  for (int t = 0; t < 2; ++t) CHECK(eta_K(g, s, t) == doctest::Approx(2 * eta_K(f, s, t)).epsilon(1e-13));
}

TEST_CASE("outer PML elements are suppressed by the weight") {
  const Scenario s = preset("example1_lossy");
  const Mesh m = initial_mesh(s, s.wavelength() / 4, MeshDomain::Pml);
  double deep = 1.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (!m.is_pml(t)) CHECK(element_weight(m, s, t) == 1.0);
    if (m.centroid(t).norm() > 0.9 * s.rho) deep = std::min(deep, element_weight(m, s, t));
  }
  CHECK(deep <= 1e-10);
}

TEST_CASE("PML residual matches a finite-difference oracle") {
  Scenario s = preset("example1_empty");
  s.fem_degree = 2;
  const Mesh m = initial_mesh(s, s.wavelength() / 4, MeshDomain::Pml);
  auto g = [&](const Vec2& x) { return cplx(x.x() * x.x() - 3 * x.x() * x.y(), x.y() * x.y()); };
  const auto f = field_on(m, s, g);
  const PmlMap map = PmlMap::from(s);
  int t = 0;
  while (!m.is_pml(t) || m.centroid(t).norm() < 0.5 * (s.R + s.rho)) ++t;
  const ElementGeometry geo(m, t);
  const std::array<double, 3> l{0.2, 0.5, 0.3};
  const Vec2 x = geo.point(l);
  const double h = 1e-5 * s.wavelength();
  auto w = [&](const Vec2& p) { return g(p) - reference_field(s, p).value; };
  auto flux = [&](const Vec2& p) -> Vec2c {
    const Vec2 ex(h, 0), ey(0, h);
    Vec2c grad((w(p + ex) - w(p - ex)) / (2 * h), (w(p + ey) - w(p - ey)) / (2 * h));
    return stretch_matrix(map, p) * grad;
  };
  const Vec2 ex(h, 0), ey(0, h);
  const cplx div = (flux(x + ex)(0) - flux(x - ex)(0)) / (2 * h) + (flux(x + ey)(1) - flux(x - ey)(1)) / (2 * h);
  const auto p = profile(map, x.norm());
  const cplx expected = div + s.kappa0 * s.kappa0 * p.alpha * p.beta * w(x);
  CHECK(std::abs(element_residual(f, s, t, l) - expected) <= 1e-4 * std::abs(expected));
}

TEST_CASE("eps_h is the root sum of the indicators") {
  const Scenario s = preset("example1_lossy");
  auto mesh = std::make_shared<const Mesh>(initial_mesh(s, s.wavelength() / 4, MeshDomain::Pml));
  const auto f = solve_on_mesh(mesh, s, Method::Pml);
  const auto rep = global_estimate(f, s, 2);
  double sum = 0.0;
  for (double e : rep.eta) sum += e * e;
  CHECK(std::abs(rep.eps_h - std::sqrt(sum)) <= 1e-12 * rep.eps_h);
  CHECK(rep.eps_pml > 0.0);
  CHECK(rep.eps_pml < 1e-15);
  CHECK(rep.dof_count == f.dofmap.num_free);
  const auto serial = global_estimate(f, s, 1);
  for (size_t t = 0; t < rep.eta.size(); ++t) CHECK(rep.eta[t] == serial.eta[t]);
}
