#pragma once

#include "cavity/scenario.hpp"

namespace cavity {

struct PmlMap {
  double R;
  double rho;
  double sigma0;
  int m_pml;

  static PmlMap from(const Scenario& s) { return {s.R, s.rho, s.sigma0, s.m_pml}; }
};

struct PmlProfile {
  double sigma;
  double sigma_hat;
  cplx alpha;
  cplx beta;
};

PmlProfile profile(const PmlMap& map, double r);

/// d(sigma)/dr and d(sigma_hat)/dr.
std::pair<double, double> profile_derivatives(const PmlMap& map, double r);

Mat2c stretch_matrix(const PmlMap& map, const Vec2& x);

/// div A as a column vector: (div A)_j = sum_i d_i A_ij.
Vec2c stretch_divergence(const PmlMap& map, const Vec2& x);

/// Estimator weight w(x); 1 for r <= R.
double weight(const PmlMap& map, double kappa0, const Vec2& x);

/// PML-side weight, valid for any r (equals 1/sqrt(1+sigma0^2) at r = R).
double weight_pml_branch(const PmlMap& map, double kappa0, double r);

/// exp(-kappa0 Im(rho~) (1 - R^2/|rho~|^2)^{1/2}).
double propagation_bound(const PmlMap& map, double kappa0);

double epsilon_pml(const PmlMap& map, double kappa0, double trace_norm_value);

/// TM: div(A grad u) + kappa0^2 alpha beta u;  TE: div(kappa0^-2 A grad u) + alpha beta u.
/// Evaluated for the coefficient fields of the map, given the 2-jet of u at x.
cplx pml_operator(const PmlMap& map, Polarization pol, double kappa0, const Vec2& x, cplx u,
                  const Vec2c& grad, const Mat2c& hess);

/// Strong-form source F (TM) or G (TE) applied to the reference field.
cplx pml_source_strong(const Scenario& s, const Vec2& x);

}  // namespace cavity
