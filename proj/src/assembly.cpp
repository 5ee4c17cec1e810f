#include "cavity/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "cavity/dtn.hpp"
#include "cavity/errors.hpp"

namespace cavity {
namespace {

using Triplet = Eigen::Triplet<cplx>;

cplx region_wavenumber(const Mesh& mesh, const Scenario& s, int t) {
  const int reg = mesh.region[t];
  return reg >= 1 ? material_wavenumber(s, reg - 1) : cplx(s.kappa0);
}

/// Point of the edge (a, b) seen from the origin at angle phi, as edge parameter s.
double edge_parameter_at_angle(const Vec2& a, const Vec2& b, double phi) {
  const Vec2 d(std::cos(phi), std::sin(phi));
  const Vec2 ab = b - a;
  const double den = d.x() * ab.y() - d.y() * ab.x();
  const double num = a.x() * d.y() - a.y() * d.x();
  return std::clamp(num / den, 0.0, 1.0);
}

// Angle in [0, pi]; ground points may carry y = -0.
double arc_angle(const Vec2& p) { return std::atan2(p.y() > 0.0 ? p.y() : 0.0, p.x()); }

struct ArcSample {
  double phi;
  double weight;  // d(phi) weight
  Vec2 point;
  std::array<double, 3> shape;
  std::array<int, 3> dofs;
};

/// Gauss points in angle over every boundary Gamma_R edge.
template <class F>
void for_each_arc_sample(const Mesh& mesh, const DofMap& dofmap, F&& f) {
  const LineRule& gl = gauss_legendre(16);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge_tags[e] != EdgeTag::GammaR) continue;
    const Vec2& a = mesh.vertices[mesh.edges[e][0]];
    const Vec2& b = mesh.vertices[mesh.edges[e][1]];
    const double pa = arc_angle(a);
    const double pb = arc_angle(b);
    const auto dofs = dofmap.edge_dofs(mesh, e);
    for (size_t q = 0; q < gl.x.size(); ++q) {
      const double phi = pa + gl.x[q] * (pb - pa);
      const double t = edge_parameter_at_angle(a, b, phi);
      f(ArcSample{phi, gl.w[q] * std::abs(pb - pa), a + t * (b - a), edge_shape(dofmap.degree, t), dofs});
    }
  }
}

void add_gamma_r_flux(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, double scale,
                      Eigen::VectorXcd& load) {
  const LineRule& gl = gauss_legendre(dofmap.degree + 3);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge_tags[e] != EdgeTag::GammaR) continue;
    const Vec2& a = mesh.vertices[mesh.edges[e][0]];
    const Vec2& b = mesh.vertices[mesh.edges[e][1]];
    const Vec2 nu = gamma_r_normal(mesh, e);
    const double len = (b - a).norm();
    const auto dofs = dofmap.edge_dofs(mesh, e);
    for (size_t q = 0; q < gl.x.size(); ++q) {
      const Vec2 x = a + gl.x[q] * (b - a);
      const cplx dn = nu.cast<cplx>().cwiseProduct(reference_field(s, x).gradient).sum();
      const auto sh = edge_shape(dofmap.degree, gl.x[q]);
      for (int k = 0; k < 3; ++k) {
        if (dofs[k] >= 0) load[dofs[k]] += scale * gl.w[q] * len * dn * sh[k];
      }
    }
  }
}

}  // namespace

FormCoefficients form_coefficients(const Mesh& mesh, const Scenario& s, int t, const Vec2& x) {
  FormCoefficients c;
  cplx ab = 1.0;
  cplx kappa = s.kappa0;
  if (mesh.is_pml(t)) {
    const PmlMap map = PmlMap::from(s);
    const auto p = profile(map, x.norm());
    ab = p.alpha * p.beta;
    c.A = stretch_matrix(map, x);
  } else {
    c.A = Mat2c::Identity();
    kappa = region_wavenumber(mesh, s, t);
  }
  if (s.polarization == Polarization::TM) {
    c.grad_coef = 1.0;
    c.mass_coef = kappa * kappa * ab;
  } else {
    c.grad_coef = 1.0 / (kappa * kappa);
    c.mass_coef = ab;
  }
  return c;
}

int quadrature_degree(const Mesh& mesh, int degree, int t) { return 2 * degree + (mesh.is_pml(t) ? 2 : 0); }

Vec2 gamma_r_normal(const Mesh& mesh, int e) {
  const Vec2& a = mesh.vertices[mesh.edges[e][0]];
  const Vec2& b = mesh.vertices[mesh.edges[e][1]];
  Vec2 n(b.y() - a.y(), a.x() - b.x());
  n.normalize();
  if (n.dot(0.5 * (a + b)) < 0.0) n = -n;
  return n;
}

FullSystem assemble_pml_full(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, RhsForm form) {
  const int nd = dofmap.num_dofs;
  const int nl = local_dof_count(dofmap.degree);
  const bool tm = s.polarization == Polarization::TM;
  const double k0sq = s.kappa0 * s.kappa0;
  std::vector<Triplet> trip;
  trip.reserve(size_t(mesh.num_triangles()) * nl * nl);
  FullSystem sys;
  sys.load = Eigen::VectorXcd::Zero(nd);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g(mesh, t);
    const auto& rule = triangle_rule(quadrature_degree(mesh, dofmap.degree, t));
    const auto& cd = dofmap.cell_dofs[t];
    const bool pml = mesh.is_pml(t);
    Eigen::Matrix<cplx, kMaxLocalDofs, kMaxLocalDofs> ke = Eigen::Matrix<cplx, kMaxLocalDofs, kMaxLocalDofs>::Zero();
    std::array<cplx, kMaxLocalDofs> fe{};
    for (const auto& qp : rule) {
      const Vec2 x = g.point(qp.lambda);
      const double w = 2.0 * g.area * qp.weight;
      const auto sh = shape_functions(dofmap.degree, g, qp.lambda);
      const FormCoefficients c = form_coefficients(mesh, s, t, x);
      std::array<Vec2c, kMaxLocalDofs> flux;
      for (int j = 0; j < nl; ++j) flux[j] = c.grad_coef * (c.A * sh.grad[j].cast<cplx>());
      for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nl; ++j) {
          ke(i, j) += w * (flux[j].cwiseProduct(sh.grad[i].cast<cplx>()).sum() - c.mass_coef * sh.value[j] * sh.value[i]);
        }
      }
      if (!pml) continue;
      if (form == RhsForm::Weak) {
        const auto ref = reference_field(s, x);
        const Vec2c aflux = c.grad_coef * (c.A * ref.gradient);
        for (int i = 0; i < nl; ++i) {
          fe[i] += w * (aflux.cwiseProduct(sh.grad[i].cast<cplx>()).sum() - c.mass_coef * ref.value * sh.value[i]);
        }
      } else {
        const cplx f = pml_source_strong(s, x);
        for (int i = 0; i < nl; ++i) fe[i] -= w * f * sh.value[i];
      }
    }
    for (int i = 0; i < nl; ++i) {
      for (int j = 0; j < nl; ++j) trip.emplace_back(cd[i], cd[j], ke(i, j));
      sys.load[cd[i]] += fe[i];
    }
  }
  if (form == RhsForm::Weak && mesh.domain == MeshDomain::Pml) {
    add_gamma_r_flux(mesh, s, dofmap, tm ? 1.0 : 1.0 / k0sq, sys.load);
  }
  sys.matrix.resize(nd, nd);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

BoundaryModes boundary_modes(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, int n_modes) {
  if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
  BoundaryModes bm{s.polarization, mesh.R, n_modes, {}, {}, {}, dtn_multipliers(s.kappa0, mesh.R, n_modes)};
  std::vector<int> local(dofmap.num_dofs, -1);
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge_tags[e] != EdgeTag::GammaR) continue;
    for (int d : dofmap.edge_dofs(mesh, e)) {
      if (d >= 0) local[d] = 0;
    }
  }
  for (int d = 0; d < dofmap.num_dofs; ++d) {
    if (local[d] >= 0) {
      local[d] = int(bm.dofs.size());
      bm.dofs.push_back(d);
    }
  }
  const int n0 = s.polarization == Polarization::TM ? 1 : 0;
  bm.C = Eigen::MatrixXd::Zero(n_modes + 1, Eigen::Index(bm.dofs.size()));
  bm.reference = Eigen::VectorXcd::Zero(n_modes + 1);
  for_each_arc_sample(mesh, dofmap, [&](const ArcSample& a) {
    const cplx uref = reference_field(s, a.point).value;
    for (int n = n0; n <= n_modes; ++n) {
      const double m = mode_projection(s.polarization, n) * a.weight * mode_function(s.polarization, n, a.phi);
      for (int k = 0; k < 3; ++k) {
        if (a.dofs[k] >= 0) bm.C(n, local[a.dofs[k]]) += m * a.shape[k];
      }
      bm.reference[n] += m * uref;
    }
  });
  return bm;
}

FullSystem assemble_tbc_full(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, int n_modes) {
  if (mesh.domain != MeshDomain::Tbc) throw ValidationError("TBC assembly requires a TBC-domain mesh");
  FullSystem sys = assemble_pml_full(mesh, s, dofmap, RhsForm::Weak);
  const bool tm = s.polarization == Polarization::TM;
  const double scale = tm ? 1.0 : 1.0 / (s.kappa0 * s.kappa0);
  add_gamma_r_flux(mesh, s, dofmap, scale, sys.load);

  const BoundaryModes bm = boundary_modes(mesh, s, dofmap, n_modes);
  const int nb = int(bm.dofs.size());
  const int n0 = tm ? 1 : 0;
  // <B u, v> = sum_n z_n w_n c_n(u) c_n(v); it enters the form with a minus sign.
  Eigen::VectorXcd zw(n_modes + 1);
  for (int n = 0; n <= n_modes; ++n) zw[n] = n < n0 ? cplx(0.0) : bm.z[n] * mode_weight(s.polarization, n, mesh.R);
  const Eigen::MatrixXcd Cz = zw.asDiagonal() * bm.C.cast<cplx>();
  const Eigen::MatrixXcd dense = bm.C.transpose().cast<cplx>() * Cz;
  std::vector<Triplet> trip;
  trip.reserve(size_t(nb) * nb);
  for (int j = 0; j < nb; ++j) {
    for (int i = 0; i < nb; ++i) trip.emplace_back(bm.dofs[i], bm.dofs[j], -scale * dense(i, j));
  }
  SparseMatrixC block(dofmap.num_dofs, dofmap.num_dofs);
  block.setFromTriplets(trip.begin(), trip.end());
  sys.matrix += block;

  const Eigen::VectorXcd bref = bm.C.transpose().cast<cplx>() * zw.cwiseProduct(bm.reference);
  for (int i = 0; i < nb; ++i) sys.load[bm.dofs[i]] -= scale * bref[i];
  return sys;
}

Eigen::VectorXcd dirichlet_values(const DofMap& dofmap, const Scenario& s) {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dofmap.num_dofs);
  for (int i = 0; i < dofmap.num_dofs; ++i) {
    if (dofmap.kind[i] == DofKind::DirichletRef) g[i] = reference_field(s, dofmap.coords[i]).value;
  }
  return g;
}

LinearSystem reduce(const FullSystem& full, const DofMap& dofmap, const Eigen::VectorXcd& lifting) {
  LinearSystem ls;
  ls.lifting = lifting;
  const Eigen::VectorXcd ag = full.matrix * lifting;
  ls.rhs.resize(dofmap.num_free);
  for (int i = 0; i < dofmap.num_dofs; ++i) {
    const int fi = dofmap.free_index[i];
    if (fi >= 0) ls.rhs[fi] = full.load[i] - ag[i];
  }
  std::vector<Triplet> trip;
  trip.reserve(full.matrix.nonZeros());
  for (int c = 0; c < full.matrix.outerSize(); ++c) {
    const int fc = dofmap.free_index[c];
    if (fc < 0) continue;
    for (SparseMatrixC::InnerIterator it(full.matrix, c); it; ++it) {
      const int fr = dofmap.free_index[it.row()];
      if (fr >= 0) trip.emplace_back(fr, fc, it.value());
    }
  }
  ls.matrix.resize(dofmap.num_free, dofmap.num_free);
  ls.matrix.setFromTriplets(trip.begin(), trip.end());
  return ls;
}

Eigen::VectorXcd expand(const DofMap& dofmap, const Eigen::VectorXcd& free_values, const Eigen::VectorXcd& lifting) {
  Eigen::VectorXcd u = lifting;
  for (int i = 0; i < dofmap.num_dofs; ++i) {
    const int fi = dofmap.free_index[i];
    if (fi >= 0) u[i] = free_values[fi];
  }
  return u;
}

LinearSystem assemble_pml(const Mesh& mesh, const Scenario& s, const DofMap& dofmap) {
  return reduce(assemble_pml_full(mesh, s, dofmap), dofmap, dirichlet_values(dofmap, s));
}

LinearSystem assemble_tbc(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, int n_modes) {
  return reduce(assemble_tbc_full(mesh, s, dofmap, n_modes), dofmap, dirichlet_values(dofmap, s));
}

}  // namespace cavity
