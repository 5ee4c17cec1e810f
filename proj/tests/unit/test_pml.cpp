#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavity/pml.hpp"

using namespace cavity;
using std::numbers::pi;

namespace {

PmlMap example1_map() { return {1.0 / 32, 3.0 / 32, 20.0, 2}; }
constexpr double kKappa0 = 32 * pi;

// exp(-40 pi/3 sqrt(1 - 9/1681)), evaluated at 40 digits.
constexpr double kExample1Bound = 7.195804894933442797663e-19;

}  // namespace

TEST_CASE("profile inside the physical domain") {
  const auto p = profile(example1_map(), 0.02);
  CHECK(p.sigma == 0.0);
  CHECK(p.sigma_hat == 0.0);
  CHECK(p.alpha == cplx(1, 0));
  CHECK(p.beta == cplx(1, 0));
}

TEST_CASE("profile at the outer radius and the midpoint") {
  const PmlMap m = example1_map();
  CHECK(profile(m, m.rho).sigma == doctest::Approx(20.0));
  const auto mid = profile(m, 0.5 * (m.R + m.rho));
  CHECK(mid.sigma == doctest::Approx(5.0));
  CHECK(mid.sigma_hat == doctest::Approx(5.0 / 6.0).epsilon(1e-13));
  CHECK(std::abs(mid.alpha - cplx(1, 5)) < 1e-13);
  CHECK(std::abs(mid.beta - cplx(1, 5.0 / 6.0)) < 1e-13);
}

TEST_CASE("stretch matrix") {
  const PmlMap m = example1_map();
  CHECK((stretch_matrix(m, Vec2(0.01, 0.02)) - Mat2c::Identity()).norm() == 0.0);
  const double r = 0.07;
  const auto p = profile(m, r);
  const Mat2c a = stretch_matrix(m, Vec2(r, 0.0));
  CHECK(std::abs(a(0, 0) - p.beta / p.alpha) < 1e-14);
  CHECK(std::abs(a(1, 1) - p.alpha / p.beta) < 1e-14);
  CHECK(std::abs(a(0, 1)) < 1e-14);
  const double phi = 0.6;
  const Mat2c a1 = stretch_matrix(m, r * Vec2(std::cos(phi), std::sin(phi)));
  const Mat2c a2 = stretch_matrix(m, r * Vec2(std::cos(pi - phi), std::sin(pi - phi)));
  CHECK(std::abs(a1(0, 0) - a2(0, 0)) < 1e-13);
  CHECK(std::abs(a1(1, 1) - a2(1, 1)) < 1e-13);
  CHECK(std::abs(a1(0, 1) + a2(0, 1)) < 1e-13);
  CHECK(std::abs(a1(0, 1) - a1(1, 0)) < 1e-15);
}

TEST_CASE("weight") {
  const PmlMap m = example1_map();
  CHECK(weight(m, kKappa0, Vec2(0.01, 0.01)) == 1.0);
  CHECK(weight(m, kKappa0, Vec2(m.R, 0.0)) == 1.0);
  CHECK(weight_pml_branch(m, kKappa0, m.R) == doctest::Approx(1.0 / std::sqrt(401.0)).epsilon(1e-14));
  CHECK(weight(m, kKappa0, Vec2(0.0, m.rho)) == doctest::Approx(kExample1Bound).epsilon(1e-9));
  for (double r = m.R; r <= m.rho; r += (m.rho - m.R) / 50) {
    const double w = weight_pml_branch(m, kKappa0, r);
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
  }
}

TEST_CASE("propagation bound") {
  const PmlMap m = example1_map();
  CHECK(propagation_bound(m, kKappa0) == doctest::Approx(kExample1Bound).epsilon(1e-9));
  PmlMap weak = m;
  weak.sigma0 = 1e-12;
  CHECK(propagation_bound(weak, kKappa0) == doctest::Approx(1.0).epsilon(1e-9));
  double prev = 2.0;
  for (double s0 : {1.0, 5.0, 10.0, 20.0, 40.0}) {
    PmlMap q = m;
    q.sigma0 = s0;
    const double b = propagation_bound(q, kKappa0);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("epsilon_pml") {
  const PmlMap m = example1_map();
  CHECK(epsilon_pml(m, kKappa0, 0.0) == 0.0);
  CHECK(epsilon_pml(m, kKappa0, 1.0) == doctest::Approx(kExample1Bound).epsilon(1e-9));
  PmlMap wide = m;
  wide.rho = m.R + 2 * (m.rho - m.R);
  CHECK(epsilon_pml(wide, kKappa0, 1.0) < epsilon_pml(m, kKappa0, 1.0));
}

TEST_CASE("strong source vanishes near R and matches finite differences") {
  for (auto pol : {Polarization::TM, Polarization::TE}) {
    Scenario s = preset("example1_empty");
    s.polarization = pol;
    s.cavity.clear();
    const PmlMap m = PmlMap::from(s);
    // div A is O(r - R) next to the interface, so the source vanishes linearly.
    const double scale = pol == Polarization::TM ? s.kappa0 * s.kappa0 : 1.0;
    CHECK(std::abs(pml_source_strong(s, Vec2(0.0, m.R * (1 + 1e-9)))) < 1e-7 * scale);

    const Vec2 x = 0.07 * Vec2(std::cos(1.1), std::sin(1.1));
    const double h = 1e-6 * s.wavelength();
    auto flux = [&](const Vec2& p) -> Vec2c { return stretch_matrix(m, p) * reference_field(s, p).gradient; };
    const Vec2 ex(h, 0), ey(0, h);
    const cplx div = (flux(x + ex)(0) - flux(x - ex)(0)) / (2 * h) + (flux(x + ey)(1) - flux(x - ey)(1)) / (2 * h);
    const auto p = profile(m, x.norm());
    const cplx u = reference_field(s, x).value;
    const double k2 = s.kappa0 * s.kappa0;
    const cplx expected = pol == Polarization::TM ? div + k2 * p.alpha * p.beta * u : div / k2 + p.alpha * p.beta * u;
    const cplx got = pml_source_strong(s, x);
    CHECK(std::abs(got - expected) <= 1e-5 * std::abs(expected));
  }
}
