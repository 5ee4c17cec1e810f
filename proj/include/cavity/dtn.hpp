#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "cavity/fem.hpp"
#include "cavity/scenario.hpp"

namespace cavity {

/// Modal coefficients of a trace on the upper half circle of radius R.
/// TM: sine coefficients a_n, n = 1..N (coeffs[0] is unused and zero).
/// TE: cosine coefficients b_n, n = 0..N.
struct TraceCoefficients {
  Polarization polarization = Polarization::TM;
  double R = 0.0;
  int N = 0;
  std::vector<cplx> coeffs;

  int first_mode() const { return polarization == Polarization::TM ? 1 : 0; }
};

struct ModeCounts {
  int N;
  int M;  // trapezoid panels in angle
};

/// N = ceil(2 kappa0 R) + 16 capped at the Hankel order limit, M = 8N.
ModeCounts default_modes(double kappa0, double R);

/// Angles phi_j = j pi / M, j = 0..M.
std::vector<double> trace_angles(int M);

/// Composite trapezoid coefficients from samples at trace_angles(M).
TraceCoefficients trace_coeffs_from_samples(Polarization pol, double R, int N, const std::vector<cplx>& samples);

TraceCoefficients trace_coeffs(Polarization pol, double R, int N, int M, const std::function<cplx(double)>& u);

enum class TracePart { Total, Scattered };

/// Field values on Gamma_R at trace_angles(M), located on the mesh's arc polyline.
/// Scattered subtracts the reference field.
std::vector<cplx> sample_trace(const SolutionField& field, const Scenario& s, int M, TracePart part);

TraceCoefficients trace_coeffs(const SolutionField& field, const Scenario& s, int N, int M, TracePart part);

/// (sum (1 + n^2)^s |c_n|^2)^{1/2}.
double trace_norm(const TraceCoefficients& c, double s);

/// z_n = kappa0 H_n'(kappa0 R) / H_n(kappa0 R) for n = 0..N.
std::vector<cplx> dtn_multipliers(double kappa0, double R, int N);

/// Modal quadrature weight: R pi / 2, or R pi for the TE constant mode.
inline double mode_weight(Polarization pol, int n, double R) {
  return (pol == Polarization::TE && n == 0) ? R * std::numbers::pi : R * std::numbers::pi / 2;
}

/// Angular basis function of mode n: sin(n phi) for TM, cos(n phi) for TE.
inline double mode_function(Polarization pol, int n, double phi) {
  return pol == Polarization::TM ? std::sin(n * phi) : std::cos(n * phi);
}

/// Coefficient extraction factor: 2/pi, or 1/pi for the TE constant mode.
inline double mode_projection(Polarization pol, int n) {
  return (pol == Polarization::TE && n == 0) ? std::numbers::inv_pi : 2 * std::numbers::inv_pi;
}

}  // namespace cavity
