#include "cavity/dtn.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cavity/errors.hpp"
#include "cavity/specfun.hpp"

namespace cavity {

ModeCounts default_modes(double kappa0, double R) {
  const int n = std::min(int(std::ceil(2.0 * kappa0 * R)) + 16, specfun::kMaxOrder);
  return {n, 8 * n};
}

std::vector<double> trace_angles(int M) {
  if (M < 1) throw ValidationError("trace sample count must be >= 1");
  std::vector<double> phi(M + 1);
  for (int j = 0; j <= M; ++j) phi[j] = std::numbers::pi * j / M;
  phi[M] = std::numbers::pi;
  return phi;
}

TraceCoefficients trace_coeffs_from_samples(Polarization pol, double R, int N, const std::vector<cplx>& samples) {
  if (N < 1) throw ValidationError("mode count N must be >= 1");
  if (samples.size() < 2) throw ValidationError("at least two trace samples are required");
  const int M = int(samples.size()) - 1;
  const auto phi = trace_angles(M);
  TraceCoefficients c{pol, R, N, std::vector<cplx>(N + 1, 0.0)};
  const double h = std::numbers::pi / M;
  for (int n = c.first_mode(); n <= N; ++n) {
    cplx acc = 0.0;
    for (int j = 0; j <= M; ++j) {
      const double w = (j == 0 || j == M) ? 0.5 : 1.0;
      acc += w * samples[j] * mode_function(pol, n, phi[j]);
    }
    c.coeffs[n] = mode_projection(pol, n) * h * acc;
  }
  return c;
}

TraceCoefficients trace_coeffs(Polarization pol, double R, int N, int M, const std::function<cplx(double)>& u) {
  const auto phi = trace_angles(M);
  std::vector<cplx> samples(M + 1);
  for (int j = 0; j <= M; ++j) samples[j] = u(phi[j]);
  return trace_coeffs_from_samples(pol, R, N, samples);
}

std::vector<cplx> sample_trace(const SolutionField& field, const Scenario& s, int M, TracePart part) {
  const Mesh& mesh = *field.mesh;
  const Locator locator(mesh);
  const auto phi = trace_angles(M);
  std::vector<cplx> out(M + 1);
  for (int j = 0; j <= M; ++j) {
    // The arc polyline sits on or inside the circle; nudge inward so boundary points locate.
    const Vec2 p = polyline_point_at_angle(mesh.R, mesh.n_arc, phi[j]) * (1.0 - 1e-10);
    Locator::Hit hit;
    try {
      hit = locator.locate(p);
    } catch (const NotFoundError&) {
      std::ostringstream msg;
      msg << "trace sample at angle " << phi[j] << " lies outside the mesh";
      throw NotFoundError(msg.str());
    }
    cplx v = field.eval(hit.triangle, hit.barycentric).value;
    if (part == TracePart::Scattered) v -= reference_field(s, p).value;
    out[j] = v;
  }
  return out;
}

TraceCoefficients trace_coeffs(const SolutionField& field, const Scenario& s, int N, int M, TracePart part) {
  return trace_coeffs_from_samples(s.polarization, field.mesh->R, N, sample_trace(field, s, M, part));
}

double trace_norm(const TraceCoefficients& c, double s) {
  double acc = 0.0;
  for (int n = c.first_mode(); n <= c.N; ++n) acc += std::pow(1.0 + double(n) * n, s) * std::norm(c.coeffs[n]);
  return std::sqrt(acc);
}

std::vector<cplx> dtn_multipliers(double kappa0, double R, int N) {
  if (!(kappa0 * R > 0.0)) throw ValidationError("kappa0 * R must be positive");
  auto z = specfun::hankel1_log_derivatives(N, cplx(kappa0 * R, 0.0));
  for (auto& v : z) v *= kappa0;
  return z;
}

}  // namespace cavity
