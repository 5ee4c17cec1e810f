#include "cavity/fem.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "cavity/errors.hpp"

namespace cavity {
namespace {

void add_s3(std::vector<TriangleQuadPoint>& r, double w) { r.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, w}); }

void add_s21(std::vector<TriangleQuadPoint>& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.push_back({{a, a, b}, w});
  r.push_back({{a, b, a}, w});
  r.push_back({{b, a, a}, w});
}

void add_s111(std::vector<TriangleQuadPoint>& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.push_back({{a, b, c}, w});
  r.push_back({{a, c, b}, w});
  r.push_back({{b, a, c}, w});
  r.push_back({{b, c, a}, w});
  r.push_back({{c, a, b}, w});
  r.push_back({{c, b, a}, w});
}

std::vector<TriangleQuadPoint> make_rule(int degree) {
  std::vector<TriangleQuadPoint> r;
  switch (degree) {
    case 1:
      add_s3(r, 0.5);
      break;
    case 2:
      add_s21(r, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 3:
    case 4:
      add_s21(r, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312 / 2);
      add_s21(r, 0.09157621350977074345957146340220, 0.10995174365532186763832632490021 / 2);
      break;
    case 5:
      add_s3(r, 0.225 / 2);
      add_s21(r, 0.47014206410511508977044120951345, 0.13239415278850618073764938783315 / 2);
      add_s21(r, 0.10128650732345633880098736191512, 0.12593918054482715259568394550018 / 2);
      break;
    case 6:
      add_s21(r, 0.24928674517091042129163855310702, 0.11678627572637936602528961138558 / 2);
      add_s21(r, 0.06308901449150222834033160287082, 0.05084490637020681692093680910686 / 2);
      add_s111(r, 0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
               0.08285107561837357519355345642044 / 2);
      break;
    default:
      throw ValidationError("quadrature degree " + std::to_string(degree) + " unavailable (1..6)");
  }
  return r;
}

LineRule make_gauss(int n) {
  LineRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = 0.5 * (1.0 - x);
    r.w[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const std::vector<TriangleQuadPoint>& triangle_rule(int degree) {
  static const std::array<std::vector<TriangleQuadPoint>, 6> rules = {make_rule(1), make_rule(2), make_rule(3),
                                                                      make_rule(4), make_rule(5), make_rule(6)};
  if (degree < 1 || degree > 6) make_rule(degree);  // throws
  return rules[degree - 1];
}

const LineRule& gauss_legendre(int n) {
  static const auto rules = [] {
    std::array<LineRule, 17> r;
    for (int k = 1; k <= 16; ++k) r[k] = make_gauss(k);
    return r;
  }();
  if (n < 1 || n > 16) throw ValidationError("Gauss-Legendre rule with " + std::to_string(n) + " points unavailable");
  return rules[n];
}

ElementGeometry::ElementGeometry(const Mesh& mesh, int t) {
  const auto& v = mesh.triangles[t];
  for (int i = 0; i < 3; ++i) p[i] = mesh.vertices[v[i]];
  const double det = orient(p[0], p[1], p[2]);
  area = 0.5 * det;
  for (int i = 0; i < 3; ++i) {
    const Vec2& pj = p[(i + 1) % 3];
    const Vec2& pk = p[(i + 2) % 3];
    grad_lambda[i] = Vec2(pj.y() - pk.y(), pk.x() - pj.x()) / det;
  }
}

ShapeData shape_functions(int degree, const ElementGeometry& g, const std::array<double, 3>& l) {
  ShapeData s;
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) {
      s.value[i] = l[i];
      s.grad[i] = g.grad_lambda[i];
    }
    return s;
  }
  for (int i = 0; i < 3; ++i) {
    s.value[i] = l[i] * (2.0 * l[i] - 1.0);
    s.grad[i] = (4.0 * l[i] - 1.0) * g.grad_lambda[i];
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    s.value[3 + i] = 4.0 * l[j] * l[k];
    s.grad[3 + i] = 4.0 * (l[k] * g.grad_lambda[j] + l[j] * g.grad_lambda[k]);
  }
  return s;
}

std::array<Eigen::Matrix2d, kMaxLocalDofs> shape_hessians(int degree, const ElementGeometry& g) {
  std::array<Eigen::Matrix2d, kMaxLocalDofs> h;
  for (auto& m : h) m.setZero();
  if (degree == 1) return h;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    h[i] = 4.0 * g.grad_lambda[i] * g.grad_lambda[i].transpose();
    h[3 + i] = 4.0 * (g.grad_lambda[j] * g.grad_lambda[k].transpose() + g.grad_lambda[k] * g.grad_lambda[j].transpose());
  }
  return h;
}

std::array<double, 3> edge_shape(int degree, double s) {
  if (degree == 1) return {1.0 - s, s, 0.0};
  return {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
}

std::array<int, 3> DofMap::edge_dofs(const Mesh& mesh, int e) const {
  const int a = mesh.edges[e][0], b = mesh.edges[e][1];
  return {a, b, degree == 2 ? mesh.num_vertices() + e : -1};
}

DofMap build_dofmap(const Mesh& mesh, const Scenario& s) {
  DofMap d;
  d.degree = s.fem_degree;
  const int nv = mesh.num_vertices();
  d.num_dofs = d.degree == 1 ? nv : nv + mesh.num_edges();
  d.cell_dofs.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    auto& cd = d.cell_dofs[t];
    cd.fill(-1);
    for (int i = 0; i < 3; ++i) cd[i] = mesh.triangles[t][i];
    if (d.degree == 2) {
      for (int i = 0; i < 3; ++i) cd[3 + i] = nv + mesh.triangle_edges[t][i];
    }
  }
  d.coords.resize(d.num_dofs);
  for (int v = 0; v < nv; ++v) d.coords[v] = mesh.vertices[v];
  if (d.degree == 2) {
    for (int e = 0; e < mesh.num_edges(); ++e) {
      d.coords[nv + e] = 0.5 * (mesh.vertices[mesh.edges[e][0]] + mesh.vertices[mesh.edges[e][1]]);
    }
  }

  d.kind.assign(d.num_dofs, DofKind::Free);
  const bool tm = s.polarization == Polarization::TM;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const EdgeTag tag = mesh.edge_tags[e];
    DofKind k = DofKind::Free;
    if (tag == EdgeTag::GammaRho) k = DofKind::DirichletRef;
    if (tm && (tag == EdgeTag::Ground || tag == EdgeTag::Wall)) k = DofKind::DirichletZero;
    if (k == DofKind::Free) continue;
    for (int dof : d.edge_dofs(mesh, e)) {
      if (dof < 0) continue;
      // Homogeneous conditions win at corners shared with the outer arc.
      if (d.kind[dof] == DofKind::Free || k == DofKind::DirichletZero) d.kind[dof] = k;
    }
  }

  d.physical.assign(d.num_dofs, 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.is_pml(t)) continue;
    for (int i = 0; i < local_dof_count(d.degree); ++i) d.physical[d.cell_dofs[t][i]] = 1;
  }

  d.free_index.assign(d.num_dofs, -1);
  for (int i = 0; i < d.num_dofs; ++i) {
    if (d.kind[i] == DofKind::Free) {
      d.free_index[i] = d.num_free++;
      if (d.physical[i]) ++d.num_physical_free;
    }
  }
  return d;
}

SolutionField::Jet SolutionField::eval(const ElementGeometry& g, int t, const std::array<double, 3>& lambda) const {
  const ShapeData sh = shape_functions(dofmap.degree, g, lambda);
  Jet j{0.0, Vec2c::Zero()};
  for (int i = 0; i < local_dof_count(dofmap.degree); ++i) {
    const cplx c = values[dofmap.cell_dofs[t][i]];
    j.value += c * sh.value[i];
    j.grad += c * sh.grad[i].cast<cplx>();
  }
  return j;
}

SolutionField::Jet SolutionField::eval(int t, const std::array<double, 3>& lambda) const {
  return eval(ElementGeometry(*mesh, t), t, lambda);
}

}  // namespace cavity
