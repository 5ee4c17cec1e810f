#include "cavity/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "cavity/dtn.hpp"
#include "cavity/errors.hpp"
#include "cavity/pml.hpp"

namespace cavity {
namespace {

double arc_angle(const Vec2& p) { return std::atan2(p.y() > 0.0 ? p.y() : 0.0, p.x()); }

/// Barycentric coordinates in t of the point at parameter sp on edge e.
std::array<double, 3> edge_point_barycentric(const Mesh& mesh, int t, int e, double sp) {
  std::array<double, 3> l{0.0, 0.0, 0.0};
  const auto& tri = mesh.triangles[t];
  for (int i = 0; i < 3; ++i) {
    if (tri[i] == mesh.edges[e][0]) l[i] = 1.0 - sp;
    if (tri[i] == mesh.edges[e][1]) l[i] = sp;
  }
  return l;
}

/// Unit normal of edge e pointing out of triangle t.
Vec2 outward_normal(const Mesh& mesh, int t, int e) {
  const Vec2& a = mesh.vertices[mesh.edges[e][0]];
  const Vec2& b = mesh.vertices[mesh.edges[e][1]];
  Vec2 n(b.y() - a.y(), a.x() - b.x());
  n.normalize();
  if (n.dot(mesh.centroid(t) - a) > 0.0) n = -n;
  return n;
}

/// Conormal flux c A grad u_h . nu on edge e seen from triangle t.
cplx conormal_flux(const SolutionField& f, const Scenario& s, int t, int e, double sp) {
  const Mesh& mesh = *f.mesh;
  const ElementGeometry g(mesh, t);
  const auto l = edge_point_barycentric(mesh, t, e, sp);
  const auto jet = f.eval(g, t, l);
  const FormCoefficients c = form_coefficients(mesh, s, t, g.point(l));
  const Vec2c flux = c.grad_coef * (c.A * jet.grad);
  return outward_normal(mesh, t, e).cast<cplx>().cwiseProduct(flux).sum();
}

int edge_points(int degree) { return degree + 2; }

/// h_e * int_e |J_e|^2.
double edge_term(const SolutionField& f, const Scenario& s, int e, const DtnTrace* dtn) {
  const LineRule& gl = gauss_legendre(edge_points(f.dofmap.degree));
  const double h = f.mesh->edge_length(e);
  double acc = 0.0;
  for (size_t q = 0; q < gl.x.size(); ++q) acc += gl.w[q] * std::norm(edge_jump(f, s, e, gl.x[q], dtn));
  return h * h * acc;
}

double residual_term(const SolutionField& f, const Scenario& s, int t) {
  const Mesh& mesh = *f.mesh;
  const double area = mesh.area(t);
  const auto& rule = triangle_rule(std::min(6, 2 * f.dofmap.degree + 2));
  const auto r = element_residual(f, s, t);
  double acc = 0.0;
  for (size_t q = 0; q < rule.size(); ++q) acc += 2.0 * area * rule[q].weight * std::norm(r[q]);
  const double hk = mesh.diameter(t);
  return hk * hk * acc;
}

}  // namespace

cplx element_residual(const SolutionField& field, const Scenario& s, int t, const std::array<double, 3>& lambda) {
  const Mesh& mesh = *field.mesh;
  const ElementGeometry g(mesh, t);
  const int nl = local_dof_count(field.dofmap.degree);
  const auto sh = shape_functions(field.dofmap.degree, g, lambda);
  const auto hs = shape_hessians(field.dofmap.degree, g);
  cplx u = 0.0;
  Vec2c grad = Vec2c::Zero();
  Mat2c hess = Mat2c::Zero();
  for (int i = 0; i < nl; ++i) {
    const cplx c = field.values[field.dofmap.cell_dofs[t][i]];
    u += c * sh.value[i];
    grad += c * sh.grad[i].cast<cplx>();
    hess += c * hs[i].cast<cplx>();
  }
  const Vec2 x = g.point(lambda);
  if (mesh.is_pml(t)) {
    return pml_operator(PmlMap::from(s), s.polarization, s.kappa0, x, u, grad, hess) - pml_source_strong(s, x);
  }
  const FormCoefficients c = form_coefficients(mesh, s, t, x);
  return c.grad_coef * hess.trace() + c.mass_coef * u;
}

std::vector<cplx> element_residual(const SolutionField& field, const Scenario& s, int t) {
  const auto& rule = triangle_rule(std::min(6, 2 * field.dofmap.degree + 2));
  std::vector<cplx> r;
  r.reserve(rule.size());
  for (const auto& qp : rule) r.push_back(element_residual(field, s, t, qp.lambda));
  return r;
}

bool in_edge_set(const Mesh& mesh, Polarization pol, int e) {
  const bool boundary = mesh.edge_triangles[e][1] < 0;
  if (!boundary) return true;
  switch (mesh.edge_tags[e]) {
    case EdgeTag::Ground:
    case EdgeTag::Wall:
      return pol == Polarization::TE;
    case EdgeTag::GammaR:
      return mesh.domain == MeshDomain::Tbc;
    default:
      return false;
  }
}

DtnTrace dtn_trace(const SolutionField& field, const Scenario& s, int n_modes) {
  DtnTrace d{boundary_modes(*field.mesh, s, field.dofmap, n_modes), {}};
  const auto& bm = d.modes;
  Eigen::VectorXcd ub(Eigen::Index(bm.dofs.size()));
  for (size_t k = 0; k < bm.dofs.size(); ++k) ub[Eigen::Index(k)] = field.values[bm.dofs[k]];
  d.scaled = bm.C.cast<cplx>() * ub - bm.reference;
  const int n0 = s.polarization == Polarization::TM ? 1 : 0;
  for (int n = 0; n <= n_modes; ++n) d.scaled[n] = n < n0 ? cplx(0.0) : d.scaled[n] * bm.z[n];
  return d;
}

cplx edge_jump(const SolutionField& field, const Scenario& s, int e, double sp, const DtnTrace* dtn) {
  const Mesh& mesh = *field.mesh;
  if (!in_edge_set(mesh, s.polarization, e)) {
    throw ValidationError(std::string("edge ") + std::to_string(e) + " (" + to_string(mesh.edge_tags[e]) +
                          ") carries no jump term");
  }
  const auto [t1, t2] = mesh.edge_triangles[e];
  if (t2 >= 0) return -(conormal_flux(field, s, t1, e, sp) + conormal_flux(field, s, t2, e, sp));
  const cplx flux = conormal_flux(field, s, t1, e, sp);
  if (mesh.edge_tags[e] != EdgeTag::GammaR) return 2.0 * flux;

  if (!dtn) throw ValidationError("Gamma_R jump requires the DtN trace");
  const Vec2& a = mesh.vertices[mesh.edges[e][0]];
  const Vec2& b = mesh.vertices[mesh.edges[e][1]];
  const Vec2 x = a + sp * (b - a);
  const double phi = arc_angle(x);
  cplx target = outward_normal(mesh, t1, e).cast<cplx>().cwiseProduct(reference_field(s, x).gradient).sum();
  for (int n = 0; n <= dtn->modes.N; ++n) target += dtn->scaled[n] * mode_function(s.polarization, n, phi);
  const double scale = s.polarization == Polarization::TM ? 1.0 : 1.0 / (s.kappa0 * s.kappa0);
  return 2.0 * (scale * target - flux);
}

double element_weight(const Mesh& mesh, const Scenario& s, int t) {
  if (!mesh.is_pml(t)) return 1.0;
  const PmlMap map = PmlMap::from(s);
  const auto& v = mesh.triangles[t];
  double w = 0.0;
  auto probe = [&](const Vec2& x) { w = std::max(w, weight_pml_branch(map, s.kappa0, x.norm())); };
  probe(mesh.centroid(t));
  for (int i = 0; i < 3; ++i) {
    const Vec2& a = mesh.vertices[v[i]];
    const Vec2& b = mesh.vertices[v[(i + 1) % 3]];
    probe(a);
    probe(0.5 * (a + b));
    const Vec2 ab = b - a;
    const double tt = std::clamp(-a.dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    probe(a + tt * ab);
  }
  return w;
}

double eta_K(const SolutionField& field, const Scenario& s, int t, const DtnTrace* dtn) {
  const Mesh& mesh = *field.mesh;
  double acc = residual_term(field, s, t);
  for (int i = 0; i < 3; ++i) {
    const int e = mesh.triangle_edges[t][i];
    if (in_edge_set(mesh, s.polarization, e)) acc += 0.5 * edge_term(field, s, e, dtn);
  }
  return element_weight(mesh, s, t) * std::sqrt(acc);
}

EstimatorReport global_estimate(const SolutionField& field, const Scenario& s, int threads, int tbc_modes) {
  const Mesh& mesh = *field.mesh;
  EstimatorReport rep;
  rep.dof_count = field.dofmap.num_free;
  rep.dof_physical = field.dofmap.num_physical_free;

  std::optional<DtnTrace> dtn;
  if (mesh.domain == MeshDomain::Tbc) {
    dtn = dtn_trace(field, s, tbc_modes > 0 ? tbc_modes : default_modes(s.kappa0, mesh.R).N);
  }
  const DtnTrace* dp = dtn ? &*dtn : nullptr;

  const int ne = mesh.num_edges();
  const int nt = mesh.num_triangles();
  std::vector<double> edge(ne, 0.0);
  rep.eta.assign(nt, 0.0);
  const int nthreads = std::max(1, threads);
  auto parallel = [&](int n, auto&& body) {
    if (nthreads == 1) {
      for (int i = 0; i < n; ++i) body(i);
      return;
    }
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) {
      pool.emplace_back([&, k] {
        for (int i = int(int64_t(n) * k / nthreads); i < int(int64_t(n) * (k + 1) / nthreads); ++i) body(i);
      });
    }
    for (auto& th : pool) th.join();
  };
  parallel(ne, [&](int e) {
    if (in_edge_set(mesh, s.polarization, e)) edge[e] = edge_term(field, s, e, dp);
  });
  parallel(nt, [&](int t) {
    double acc = residual_term(field, s, t);
    for (int i = 0; i < 3; ++i) acc += 0.5 * edge[mesh.triangle_edges[t][i]];
    rep.eta[t] = element_weight(mesh, s, t) * std::sqrt(acc);
  });

  double sum = 0.0;
  for (double v : rep.eta) sum += v * v;
  rep.eps_h = std::sqrt(sum);

  bool has_pml = false;
  for (int t = 0; t < mesh.num_triangles() && !has_pml; ++t) has_pml = mesh.is_pml(t);
  if (mesh.domain == MeshDomain::Pml && has_pml) {
    const auto m = default_modes(s.kappa0, mesh.R);
    const auto c = trace_coeffs(field, s, m.N, m.M, TracePart::Scattered);
    rep.eps_pml = epsilon_pml(PmlMap::from(s), s.kappa0, trace_norm(c, 0.5));
  }
  return rep;
}

}  // namespace cavity
