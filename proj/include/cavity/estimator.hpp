#pragma once

#include <vector>

#include "cavity/assembly.hpp"
#include "cavity/fem.hpp"

namespace cavity {

struct EstimatorReport {
  std::vector<double> eta;  // per element
  double eps_h = 0.0;
  double eps_pml = 0.0;
  int dof_count = 0;
  int dof_physical = 0;
};

/// Modified residual at a point of element t: R(u_h) in the physical domain,
/// R(u_h) - F (TM) or R(u_h) - G (TE) in PML elements.
cplx element_residual(const SolutionField& field, const Scenario& s, int t, const std::array<double, 3>& lambda);

/// Residual at the points of the element's quadrature rule.
std::vector<cplx> element_residual(const SolutionField& field, const Scenario& s, int t);

/// DtN data of a TBC solution: (B u_h + f)(phi) = d_nu u^ref + sum_n scaled[n] mode_n(phi).
struct DtnTrace {
  BoundaryModes modes;
  Eigen::VectorXcd scaled;  // z_n (c_n(u_h) - c_n(u^ref))
};

DtnTrace dtn_trace(const SolutionField& field, const Scenario& s, int n_modes);

/// Whether edge e carries a jump term: interior edges, plus ground and wall edges for TE,
/// plus Gamma_R edges of a TBC mesh.
bool in_edge_set(const Mesh& mesh, Polarization pol, int e);

/// Flux jump J_e at parameter s in [0, 1] from edges[e][0] to edges[e][1].
/// Throws ValidationError for edges outside the polarization's edge set.
/// Gamma_R edges of a TBC mesh need the DtN trace.
cplx edge_jump(const SolutionField& field, const Scenario& s, int e, double sp, const DtnTrace* dtn = nullptr);

/// max_K w(x) over the element's sample points.
double element_weight(const Mesh& mesh, const Scenario& s, int t);

double eta_K(const SolutionField& field, const Scenario& s, int t, const DtnTrace* dtn = nullptr);

/// eta_K on every element, eps_h and, for PML meshes, eps_PML from the scattered trace.
/// tbc_modes = 0 selects default_modes() for the DtN jump on TBC meshes.
EstimatorReport global_estimate(const SolutionField& field, const Scenario& s, int threads = 1, int tbc_modes = 0);

}  // namespace cavity
