#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "cavity/adapt.hpp"
#include "cavity/assembly.hpp"
#include "cavity/dtn.hpp"
#include "test_support.hpp"

using namespace cavity;
using std::numbers::pi;

namespace {

Eigen::MatrixXcd dense(const SparseMatrixC& a) { return Eigen::MatrixXcd(a); }

// Relative H1 error of a field against u^ref over the physical elements.
double h1_error(const SolutionField& f, const Scenario& s) {
  double err = 0.0, ref = 0.0;
  const Mesh& m = *f.mesh;
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.is_pml(t)) continue;
    const ElementGeometry g(m, t);
    for (const auto& q : triangle_rule(6)) {
      const Vec2 x = g.point(q.lambda);
      const auto u = f.eval(g, t, q.lambda);
      const auto r = reference_field(s, x);
      const double w = 2 * g.area * q.weight;
      err += w * (std::norm(u.value - r.value) + (u.grad - r.gradient).squaredNorm());
      ref += w * (std::norm(r.value) + r.gradient.squaredNorm());
    }
  }
  return std::sqrt(err / ref);
}

}  // namespace

TEST_CASE("P1 local stiffness and mass on the unit right triangle") {
  const Mesh m = testing::square_mesh(1);
  const DofMap d1 = build_dofmap(m, testing::plain_scenario(Polarization::TM, 1.0));
  const auto a1 = dense(assemble_pml_full(m, testing::plain_scenario(Polarization::TM, 1.0), d1).matrix);
  const auto a2 = dense(assemble_pml_full(m, testing::plain_scenario(Polarization::TM, 2.0), d1).matrix);
  const Eigen::MatrixXcd mass = (a1 - a2) / 3.0;
  const Eigen::MatrixXcd stiff = a1 + mass;
  Eigen::Matrix3d k;
  k << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  Eigen::Matrix3d mm;
  mm << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  mm *= 0.5 / 12;
  CHECK((stiff - k.cast<cplx>()).norm() < 1e-14);
  CHECK((mass - mm.cast<cplx>()).norm() < 1e-14);
}

TEST_CASE("P2 dof count on two triangles") {
  const Mesh m = testing::square_mesh(2);
  Scenario s = testing::plain_scenario(Polarization::TM, 1.0);
  s.fem_degree = 2;
  const DofMap d = build_dofmap(m, s);
  CHECK(m.num_edges() == 5);
  CHECK(d.num_dofs == 9);
}

TEST_CASE("boundary condition classification by polarization") {
  Scenario s = preset("example1_empty");
  const Mesh m = initial_mesh(s, s.wavelength() / 4, MeshDomain::Pml);
  const DofMap tm = build_dofmap(m, s);
  s.polarization = Polarization::TE;
  const DofMap te = build_dofmap(m, s);
  int checked = 0;
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto tag = m.edge_tags[e];
    if (tag != EdgeTag::Ground && tag != EdgeTag::Wall) continue;
    for (int v : m.edges[e]) {
      CHECK(tm.kind[v] == DofKind::DirichletZero);
      CHECK(te.kind[v] != DofKind::DirichletZero);
      ++checked;
    }
  }
  CHECK(checked > 0);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edge_tags[e] != EdgeTag::GammaRho) continue;
    for (int v : m.edges[e]) CHECK(te.kind[v] == DofKind::DirichletRef);
  }
}

TEST_CASE("system matrix is complex symmetric") {
  for (auto name : {"example1_lossy", "example2_coated"}) {
    Scenario s = preset(name);
    s.fem_degree = 2;
    const Mesh m = initial_mesh(s, s.wavelength() / 3, MeshDomain::Pml);
    const DofMap d = build_dofmap(m, s);
    const SparseMatrixC a = assemble_pml_full(m, s, d).matrix;
    const SparseMatrixC at = a.transpose();
    CHECK((a - at).norm() <= 1e-12 * a.norm());
  }
}

TEST_CASE("weak and strong right-hand sides agree") {
  for (auto pol : {Polarization::TM, Polarization::TE}) {
    Scenario s = flat_ground(pol, 8 * pi, pi / 4, 0.5);
    s.fem_degree = 2;
    const Mesh m = initial_mesh(s, s.wavelength() / 24, MeshDomain::Pml);
    const DofMap d = build_dofmap(m, s);
    const auto weak = assemble_pml_full(m, s, d, RhsForm::Weak).load;
    const auto strong = assemble_pml_full(m, s, d, RhsForm::Strong).load;
    double diff = 0.0, norm = 0.0;
    for (int i = 0; i < d.num_dofs; ++i) {
      if (d.kind[i] != DofKind::Free) continue;
      diff += std::norm(weak[i] - strong[i]);
      norm += std::norm(strong[i]);
    }
    CHECK(norm > 0.0);
    CHECK(std::sqrt(diff / norm) <= 1e-4);
  }
}

TEST_CASE("Galerkin orthogonality of the discrete solution") {
  Scenario s = preset("example1_lossy");
  auto mesh = std::make_shared<const Mesh>(initial_mesh(s, s.wavelength() / 6, MeshDomain::Pml));
  const SolutionField f = solve_on_mesh(mesh, s, Method::Pml);
  const LinearSystem sys = assemble_pml(*mesh, s, f.dofmap);
  Eigen::VectorXcd free(f.dofmap.num_free);
  for (int i = 0; i < f.dofmap.num_dofs; ++i)
    if (f.dofmap.free_index[i] >= 0) free[f.dofmap.free_index[i]] = f.values[i];
  const Eigen::VectorXcd r = sys.matrix * free - sys.rhs;
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(free.size());
    for (int i = k; i < v.size(); i += 7) v[i] = cplx(std::cos(i), std::sin(3 * i));
    CHECK(std::abs(v.cwiseProduct(r).sum()) <= 1e-9 * v.norm() * sys.rhs.norm());
  }
}

TEST_CASE("flat ground reproduces the reference field") {
  for (auto pol : {Polarization::TM, Polarization::TE}) {
    Scenario s = flat_ground(pol, 8 * pi, pi / 4, 0.125);
    s.fem_degree = 2;
    s = select_pml(s, 1e-8);
    auto mesh = std::make_shared<const Mesh>(initial_mesh(s, s.wavelength() / 16, MeshDomain::Pml));
    const SolutionField f = solve_on_mesh(mesh, s, Method::Pml);
    CHECK(f.dofmap.num_dofs > 1000);
    CHECK(h1_error(f, s) <= 1e-2);
    auto tmesh = std::make_shared<const Mesh>(initial_mesh(s, s.wavelength() / 16, MeshDomain::Tbc));
    CHECK(h1_error(solve_on_mesh(tmesh, s, Method::Tbc), s) <= 1e-2);
  }
}

TEST_CASE("DtN block reproduces z_n w_n for single boundary modes") {
  for (auto pol : {Polarization::TM, Polarization::TE}) {
    Scenario s = flat_ground(pol, 32 * pi, 0.0, 0.5);
    s.n_arc = 256;
    s.fem_degree = 2;
    const Mesh m = initial_mesh(s, s.wavelength() / 8, MeshDomain::Tbc);
    const DofMap d = build_dofmap(m, s);
    const int N = 20;
    const auto dense_tbc = dense(assemble_tbc_full(m, s, d, N).matrix);
    const auto dense_vol = dense(assemble_pml_full(m, s, d).matrix);
    const double scale = pol == Polarization::TM ? 1.0 : 1.0 / (s.kappa0 * s.kappa0);
    const Eigen::MatrixXcd b = -(dense_tbc - dense_vol) / scale;

    const int n = pol == Polarization::TM ? 1 : 0;
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(d.num_dofs);
    for (int i = 0; i < d.num_dofs; ++i) {
      const Vec2 x = d.coords[i];
      if (std::abs(x.norm() - s.R) < 1e-3 * s.R) u[i] = mode_function(pol, n, std::atan2(x.y(), x.x()));
    }
    const cplx form = u.cwiseProduct(b * u).sum();
    const auto z = dtn_multipliers(s.kappa0, s.R, N);
    const cplx expected = z[n] * mode_weight(pol, n, s.R);
    CHECK(std::abs(form - expected) <= 1e-3 * std::abs(expected));
    const cplx twice = (2.0 * u).cwiseProduct(b * u).sum();
    CHECK(std::abs(twice - 2.0 * form) <= 1e-12 * std::abs(form));
  }
}
