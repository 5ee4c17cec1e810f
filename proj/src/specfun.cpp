#include "cavity/specfun.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "cavity/errors.hpp"

namespace cavity::specfun {
namespace {

using std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kSeriesRadius = 2.0;
constexpr double kAsymptoticRadius = 25.0;
constexpr int kLaguerreNodes = 80;

struct LaguerreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Generalized Gauss-Laguerre rule for the weight u^alpha e^{-u} (Golub-Welsch).
LaguerreRule make_laguerre_rule(int n, double alpha) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + alpha + 1.0;
  for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(i * (i + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const double mu0 = std::tgamma(alpha + 1.0);
  LaguerreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()[i];
    const double v = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

const LaguerreRule& laguerre_rule(int order) {
  static const std::array<LaguerreRule, 2> rules = {
      make_laguerre_rule(kLaguerreNodes, -0.5),
      make_laguerre_rule(kLaguerreNodes, 0.5)};
  return rules[order];
}

// H_nu(z) = sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} / Gamma(nu+1/2)
//           * int_0^inf e^{-u} u^{nu-1/2} (1 + iu/(2z))^{nu-1/2} du
cplx hankel_integral(int order, cplx z) {
  const LaguerreRule& rule = laguerre_rule(order);
  const cplx i(0.0, 1.0);
  const double expo = order - 0.5;
  cplx sum = 0.0;
  for (int k = kLaguerreNodes - 1; k >= 0; --k) {
    sum += rule.weights[k] * std::pow(1.0 + i * rule.nodes[k] / (2.0 * z), expo);
  }
  const double gamma_half = order == 0 ? std::sqrt(pi) : 0.5 * std::sqrt(pi);
  const cplx phase = std::exp(i * (z - order * pi / 2.0 - pi / 4.0));
  return std::sqrt(2.0 / (pi * z)) * phase * sum / gamma_half;
}

cplx hankel_asymptotic(int order, cplx z) {
  const cplx i(0.0, 1.0);
  const double mu = 4.0 * order * order;
  cplx term = 1.0;
  cplx sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= i * (mu - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(term);
    if (mag > last) break;
    sum += term;
    last = mag;
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  const cplx phase = std::exp(i * (z - order * pi / 2.0 - pi / 4.0));
  return std::sqrt(2.0 / (pi * z)) * phase * sum;
}

// Ascending series for J_0, J_1, Y_0, Y_1; returns {H_0, H_1}.
std::array<cplx, 2> hankel_series(cplx z) {
  const cplx q = -0.25 * z * z;
  const cplx half = 0.5 * z;
  cplx j0 = 0.0, j1 = 0.0, s0 = 0.0, s1 = 0.0;
  cplx t0 = 1.0;  // q^k / (k!)^2
  cplx t1 = 1.0;  // q^k / (k!(k+1)!)
  double harmonic = 0.0;
  for (int k = 0; k < 80; ++k) {
    if (k > 0) {
      t0 *= q / (double(k) * k);
      t1 *= q / (double(k) * (k + 1));
      harmonic += 1.0 / k;
    }
    j0 += t0;
    j1 += t1;
    s0 += harmonic * t0;
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    s1 += (-2.0 * kEulerGamma + 2.0 * harmonic + 1.0 / (k + 1)) * t1;
    if (std::abs(t0) < 1e-18 * std::abs(j0) && std::abs(t1) < 1e-18 * std::abs(j1)) break;
  }
  j1 *= half;
  const cplx log_half = std::log(half);
  const cplx y0 = (2.0 / pi) * ((log_half + kEulerGamma) * j0 - s0);
  const cplx y1 = -2.0 / (pi * z) + (2.0 / pi) * log_half * j1 - half * s1 / pi;
  const cplx i(0.0, 1.0);
  return {j0 + i * y0, j1 + i * y1};
}

void check_argument(int nmax, cplx z) {
  if (nmax < 0 || nmax > kMaxOrder) {
    throw DomainError("hankel1: unsupported order " + std::to_string(nmax));
  }
  if (std::abs(z) < kMinArgument) {
    throw DomainError("hankel1: argument too close to zero");
  }
  if (z.imag() < -1e-14 * std::abs(z)) {
    throw DomainError("hankel1: Im z must be non-negative");
  }
}

// H_0, H_1 for z in the closed first quadrant.
std::array<cplx, 2> hankel01_first_quadrant(cplx z) {
  const double r = std::abs(z);
  if (r < kSeriesRadius) return hankel_series(z);
  if (r <= kAsymptoticRadius) return {hankel_integral(0, z), hankel_integral(1, z)};
  return {hankel_asymptotic(0, z), hankel_asymptotic(1, z)};
}

std::array<cplx, 2> hankel01(cplx z) {
  if (z.imag() < 0.0) z = {z.real(), 0.0};
  if (z.real() >= 0.0) return hankel01_first_quadrant(z);
  // z = -conj(w), w in the first quadrant.
  const cplx w(-z.real(), z.imag());
  auto h = hankel01_first_quadrant(w);
  return {-std::conj(h[0]), std::conj(h[1])};
}

}  // namespace

std::vector<cplx> hankel1_sequence(int nmax, cplx z) {
  check_argument(nmax, z);
  const auto h01 = hankel01(z);
  std::vector<cplx> h(nmax + 1);
  h[0] = h01[0];
  if (nmax >= 1) h[1] = h01[1];
  for (int n = 1; n < nmax; ++n) {
    h[n + 1] = (2.0 * n / z) * h[n] - h[n - 1];
    if (std::abs(h[n + 1]) > kOverflowLimit || !std::isfinite(std::abs(h[n + 1]))) {
      throw DomainError("hankel1: |H_" + std::to_string(n + 1) +
                        "| exceeds the representable range; use log-derivatives");
    }
  }
  return h;
}

HankelValue hankel1(int n, cplx z) {
  check_argument(n, z);
  const auto h = hankel1_sequence(std::max(n, 1), z);
  HankelValue out;
  out.order = n;
  out.argument = z;
  out.value = h[n];
  out.derivative = n == 0 ? -h[1] : h[n - 1] - (double(n) / z) * h[n];
  return out;
}

std::vector<cplx> hankel1_log_derivatives(int nmax, cplx z) {
  check_argument(nmax, z);
  const auto h01 = hankel01(z);
  std::vector<cplx> out(nmax + 1);
  cplx q = h01[1] / h01[0];  // q_1 = H_1/H_0
  out[0] = -q;
  for (int n = 1; n <= nmax; ++n) {
    out[n] = 1.0 / q - double(n) / z;
    q = 2.0 * n / z - 1.0 / q;  // q_{n+1}
  }
  return out;
}

std::vector<cplx> hankel1_reciprocals(int nmax, cplx z) {
  check_argument(nmax, z);
  const auto h01 = hankel01(z);
  std::vector<cplx> out(nmax + 1);
  out[0] = 1.0 / h01[0];
  cplx q = h01[1] / h01[0];
  for (int n = 1; n <= nmax; ++n) {
    out[n] = out[n - 1] / q;
    q = 2.0 * n / z - 1.0 / q;
  }
  return out;
}

cplx bessel_j(int n, cplx z) {
  if (n < 0) throw DomainError("bessel_j: negative order");
  if (std::abs(z) == 0.0) return n == 0 ? 1.0 : 0.0;
  const double scale = std::max<double>(n, std::abs(z));
  int start = int(scale + 30.0 + std::sqrt(40.0 * scale));
  start += start % 2;
  const cplx i(0.0, 1.0);
  // Normalisation: e^{-iz} = J_0 + 2 sum (-i)^k J_k  (well conditioned for Im z >= 0).
  const bool upper = z.imag() >= 0.0;
  const cplx unit = upper ? -i : i;
  cplx next = 0.0, cur = 1e-30, jn = 0.0, norm = 0.0;
  cplx power = std::pow(unit, start);
  for (int k = start; k >= 1; --k) {
    norm += 2.0 * power * cur;
    if (k == n) jn = cur;
    const cplx prev = (2.0 * k / z) * cur - next;
    next = cur;
    cur = prev;
    power /= unit;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      jn *= 1e-250;
      norm *= 1e-250;
    }
  }
  if (n == 0) jn = cur;
  norm += cur;
  const cplx target = upper ? std::exp(-i * z) : std::exp(i * z);
  return jn * target / norm;
}

double bessel_y(int n, double x) {
  if (x <= 0.0) throw DomainError("bessel_y: argument must be positive");
  return hankel1(n, cplx(x, 0.0)).value.imag();
}

}  // namespace cavity::specfun
