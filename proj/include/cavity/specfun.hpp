#pragma once

#include <complex>
#include <vector>

namespace cavity::specfun {

using cplx = std::complex<double>;

inline constexpr int kMaxOrder = 200;
inline constexpr double kMinArgument = 1e-8;
/// Magnitudes above this are reported as a DomainError instead of overflowing.
inline constexpr double kOverflowLimit = 1e280;

struct HankelValue {
  int order = 0;
  cplx argument;
  cplx value;       // H_n^(1)(z)
  cplx derivative;  // d/dz H_n^(1)(z)
};

/// Hankel function of the first kind, integer order 0 <= n <= 200, Im z >= 0.
///
/// H_0 and H_1 come from the ascending series (|z| < 2), a Gauss-Laguerre
/// evaluation of the Hankel integral representation (2 <= |z| <= 25) or the
/// Hankel asymptotic expansion (|z| > 25); higher orders use the upward
/// recurrence, which is stable for H^(1).  Arguments with Re z < 0 are mapped
/// by H_n(-conj w) = (-1)^(n+1) conj(H_n(w)).
HankelValue hankel1(int n, cplx z);

/// H_0^(1)(z) .. H_nmax^(1)(z).  Throws DomainError once a value exceeds
/// kOverflowLimit.
std::vector<cplx> hankel1_sequence(int nmax, cplx z);

/// Log-derivatives H_n'(z)/H_n(z) for n = 0..nmax, evaluated from the ratio
/// recurrence q_{n+1} = 2n/z - 1/q_n with q_n = H_n/H_{n-1}; never overflows.
std::vector<cplx> hankel1_log_derivatives(int nmax, cplx z);

/// Reciprocals 1/H_n^(1)(z) for n = 0..nmax (underflow to zero is allowed).
std::vector<cplx> hankel1_reciprocals(int nmax, cplx z);

/// Bessel function of the first kind by Miller backward recurrence.
cplx bessel_j(int n, cplx z);

/// Bessel function of the second kind for real x > 0: Im H_n^(1)(x).
double bessel_y(int n, double x);

}  // namespace cavity::specfun
