#pragma once

#include <vector>

#include <Eigen/Core>

#include "cavity/fem.hpp"
#include "cavity/mesh.hpp"
#include "cavity/pml.hpp"
#include "cavity/solver.hpp"

namespace cavity {

/// Operator and load over every global dof, before boundary conditions.
/// Row i is the test function, column j the trial function.
struct FullSystem {
  SparseMatrixC matrix;
  Eigen::VectorXcd load;
};

/// System on the free dofs after lifting the Dirichlet data.
struct LinearSystem {
  SparseMatrixC matrix;
  Eigen::VectorXcd rhs;
  Eigen::VectorXcd lifting;  // all dofs: Dirichlet values on constrained dofs, zero elsewhere
};

enum class RhsForm { Weak, Strong };

/// Coefficients of the bilinear form at a point: kernel grad_coef (A grad u . grad v) - mass_coef u v.
struct FormCoefficients {
  Mat2c A;
  cplx grad_coef;  // 1 (TM) or kappa^-2 (TE)
  cplx mass_coef;  // kappa^2 alpha beta (TM) or alpha beta (TE)
};

FormCoefficients form_coefficients(const Mesh& mesh, const Scenario& s, int t, const Vec2& x);

/// Exactness degree of the element rule: 2m in the physical domain, 2m + 2 in the PML.
int quadrature_degree(const Mesh& mesh, int degree, int t);

/// Outward unit normal of Omega on a Gamma_R edge (points away from the origin side).
Vec2 gamma_r_normal(const Mesh& mesh, int e);

FullSystem assemble_pml_full(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, RhsForm form = RhsForm::Weak);

/// Modal projections of the boundary basis on Gamma_R, by angle-parametrised
/// Gauss-Legendre quadrature on each boundary edge.
struct BoundaryModes {
  Polarization polarization;
  double R;
  int N;
  std::vector<int> dofs;           // boundary dofs, ascending
  Eigen::MatrixXd C;               // (N+1) x dofs.size(): c_n of each basis trace
  Eigen::VectorXcd reference;      // c_n of the reference field trace
  std::vector<cplx> z;             // DtN multipliers z_n
};

BoundaryModes boundary_modes(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, int n_modes);

FullSystem assemble_tbc_full(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, int n_modes);

/// u^ref at DirichletRef dofs, zero elsewhere.
Eigen::VectorXcd dirichlet_values(const DofMap& dofmap, const Scenario& s);

LinearSystem reduce(const FullSystem& full, const DofMap& dofmap, const Eigen::VectorXcd& lifting);

/// Global dof vector from the free solution and the lifting.
Eigen::VectorXcd expand(const DofMap& dofmap, const Eigen::VectorXcd& free_values, const Eigen::VectorXcd& lifting);

LinearSystem assemble_pml(const Mesh& mesh, const Scenario& s, const DofMap& dofmap);
LinearSystem assemble_tbc(const Mesh& mesh, const Scenario& s, const DofMap& dofmap, int n_modes);

}  // namespace cavity
