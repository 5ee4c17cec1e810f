#include "cavity/pml.hpp"

#include <cmath>

namespace cavity {

PmlProfile profile(const PmlMap& map, double r) {
  PmlProfile p{0.0, 0.0, 1.0, 1.0};
  if (r <= map.R) return p;
  const double d = map.rho - map.R;
  const double t = r - map.R;
  p.sigma = map.sigma0 * std::pow(t / d, map.m_pml);
  p.sigma_hat = map.sigma0 * std::pow(t, map.m_pml + 1) / ((map.m_pml + 1) * r * std::pow(d, map.m_pml));
  p.alpha = cplx(1.0, p.sigma);
  p.beta = cplx(1.0, p.sigma_hat);
  return p;
}

std::pair<double, double> profile_derivatives(const PmlMap& map, double r) {
  if (r <= map.R) return {0.0, 0.0};
  const double d = map.rho - map.R;
  const double t = r - map.R;
  const double ds = map.sigma0 * map.m_pml * std::pow(t, map.m_pml - 1) / std::pow(d, map.m_pml);
  const auto p = profile(map, r);
  return {ds, (p.sigma - p.sigma_hat) / r};
}

Mat2c stretch_matrix(const PmlMap& map, const Vec2& x) {
  const double r = x.norm();
  if (r <= map.R) return Mat2c::Identity();
  const auto p = profile(map, r);
  const cplx a = p.beta / p.alpha;
  const cplx b = p.alpha / p.beta;
  const double c = x.x() / r;
  const double s = x.y() / r;
  Mat2c A;
  A(0, 0) = a * c * c + b * s * s;
  A(0, 1) = (a - b) * s * c;
  A(1, 0) = A(0, 1);
  A(1, 1) = a * s * s + b * c * c;
  return A;
}

Vec2c stretch_divergence(const PmlMap& map, const Vec2& x) {
  const double r = x.norm();
  if (r <= map.R) return Vec2c::Zero();
  const auto p = profile(map, r);
  const auto [ds, dsh] = profile_derivatives(map, r);
  const cplx i(0.0, 1.0);
  const cplx da = i * ds;
  const cplx db = i * dsh;
  const cplx a = p.beta / p.alpha;
  const cplx b = p.alpha / p.beta;
  const cplx a_prime = (db * p.alpha - p.beta * da) / (p.alpha * p.alpha);
  const cplx radial = a_prime + (a - b) / r;
  return Vec2c(radial * (x.x() / r), radial * (x.y() / r));
}

double weight_pml_branch(const PmlMap& map, double kappa0, double r) {
  const auto p = profile(map, r);
  const double im_rt = r * p.sigma_hat;
  const double abs_rt2 = r * r * std::norm(p.beta);
  const double root = std::sqrt(std::max(0.0, 1.0 - r * r / abs_rt2));
  return std::abs(p.alpha) / std::abs(cplx(1.0, map.sigma0)) * std::exp(-kappa0 * im_rt * root);
}

double weight(const PmlMap& map, double kappa0, const Vec2& x) {
  const double r = x.norm();
  if (r <= map.R) return 1.0;
  return weight_pml_branch(map, kappa0, r);
}

double propagation_bound(const PmlMap& map, double kappa0) {
  const auto p = profile(map, map.rho);
  const cplx rt = map.rho * p.beta;
  const double root = std::sqrt(std::max(0.0, 1.0 - map.R * map.R / std::norm(rt)));
  return std::exp(-kappa0 * rt.imag() * root);
}

double epsilon_pml(const PmlMap& map, double kappa0, double trace_norm_value) {
  return propagation_bound(map, kappa0) * trace_norm_value;
}

cplx pml_operator(const PmlMap& map, Polarization pol, double kappa0, const Vec2& x, cplx u,
                  const Vec2c& grad, const Mat2c& hess) {
  const Mat2c A = stretch_matrix(map, x);
  const Vec2c divA = stretch_divergence(map, x);
  const auto p = profile(map, x.norm());
  const cplx div_flux = divA.cwiseProduct(grad).sum() + A.cwiseProduct(hess).sum();
  if (pol == Polarization::TM) return div_flux + kappa0 * kappa0 * p.alpha * p.beta * u;
  return div_flux / (kappa0 * kappa0) + p.alpha * p.beta * u;
}

cplx pml_source_strong(const Scenario& s, const Vec2& x) {
  const auto jet = reference_jet(s, x);
  return pml_operator(PmlMap::from(s), s.polarization, s.kappa0, x, jet.value, jet.gradient, jet.hessian);
}

}  // namespace cavity
