#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "cavity/mesh.hpp"

namespace cavity {

/// Quadrature point in barycentric coordinates; weights sum to 1/2 (reference area).
struct TriangleQuadPoint {
  std::array<double, 3> lambda;
  double weight;
};

/// Symmetric (Dunavant) rules exact for polynomials of the given degree (1..6).
const std::vector<TriangleQuadPoint>& triangle_rule(int degree);

/// Gauss-Legendre rule on [0, 1] with n points.
struct LineRule {
  std::vector<double> x;
  std::vector<double> w;
};
const LineRule& gauss_legendre(int n);

inline constexpr int kMaxLocalDofs = 6;

inline int local_dof_count(int degree) { return degree == 1 ? 3 : 6; }

struct ElementGeometry {
  std::array<Vec2, 3> p;
  double area;
  std::array<Vec2, 3> grad_lambda;

  ElementGeometry(const Mesh& mesh, int t);
  Vec2 point(const std::array<double, 3>& l) const { return l[0] * p[0] + l[1] * p[1] + l[2] * p[2]; }
};

struct ShapeData {
  std::array<double, kMaxLocalDofs> value{};
  std::array<Vec2, kMaxLocalDofs> grad{};
};

/// Lagrange basis of degree 1 or 2: local dofs 0..2 at vertices, 3+i at the midpoint of the edge opposite vertex i.
ShapeData shape_functions(int degree, const ElementGeometry& g, const std::array<double, 3>& l);

/// Constant Hessians of the local basis (zero for degree 1).
std::array<Eigen::Matrix2d, kMaxLocalDofs> shape_hessians(int degree, const ElementGeometry& g);

/// Edge trace of the basis: values of the dofs on edge (a -> b) at parameter s in [0, 1].
/// Order: dof at a, dof at b, midpoint dof (degree 2).
std::array<double, 3> edge_shape(int degree, double s);

enum class DofKind : std::uint8_t { Free, DirichletZero, DirichletRef };

struct DofMap {
  int degree = 1;
  int num_dofs = 0;
  int num_free = 0;
  std::vector<std::array<int, kMaxLocalDofs>> cell_dofs;
  std::vector<DofKind> kind;
  std::vector<Vec2> coords;
  std::vector<int> free_index;   // -1 for constrained dofs
  std::vector<char> physical;    // basis support touches a non-PML element
  int num_physical_free = 0;

  /// Global dofs on edge e in edge_shape order (a = edges[e][0], b = edges[e][1]).
  std::array<int, 3> edge_dofs(const Mesh& mesh, int e) const;
};

DofMap build_dofmap(const Mesh& mesh, const Scenario& s);

/// Finite-element field bound to its mesh.
struct SolutionField {
  std::shared_ptr<const Mesh> mesh;
  DofMap dofmap;
  Eigen::VectorXcd values;  // one entry per global dof

  struct Jet {
    cplx value;
    Vec2c grad;
  };
  Jet eval(int t, const std::array<double, 3>& lambda) const;
  Jet eval(const ElementGeometry& g, int t, const std::array<double, 3>& lambda) const;
};

}  // namespace cavity
