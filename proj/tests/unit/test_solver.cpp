#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "cavity/errors.hpp"
#include "cavity/solver.hpp"

using namespace cavity;

namespace {

SparseMatrixC from_dense(const Eigen::MatrixXcd& d) {
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (d(i, j) != cplx(0)) t.emplace_back(i, j, d(i, j));
  SparseMatrixC a(d.rows(), d.cols());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

TEST_CASE("identity returns the right-hand side") {
  SparseMatrixC a(5, 5);
  a.setIdentity();
  Eigen::VectorXcd b(5);
  b << cplx(1, 2), cplx(-3, 0), cplx(0, 4), cplx(5, 5), cplx(0.5, -0.25);
  CHECK((solve(a, b) - b).norm() < 1e-14);
}

TEST_CASE("complex symmetric 2x2") {
  Eigen::MatrixXcd d(2, 2);
  d << cplx(2, 0), cplx(0, 1), cplx(0, 1), cplx(1, 0);
  Eigen::VectorXcd b(2);
  b << 1.0, 0.0;
  const Eigen::VectorXcd x = solve(from_dense(d), b);
  CHECK(std::abs(x(0) - cplx(1.0 / 3, 0)) < 1e-14);
  CHECK(std::abs(x(1) - cplx(0, -1.0 / 3)) < 1e-14);
}

TEST_CASE("zero row is reported as singular") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Identity(3, 3);
  d(1, 1) = 0.0;
  d(0, 1) = 2.0;
  Eigen::VectorXcd b = Eigen::VectorXcd::Ones(3);
  CHECK_THROWS_AS(solve(from_dense(d), b), SingularMatrixError);
}

TEST_CASE("numerically singular matrix is reported as singular") {
  Eigen::MatrixXcd d(2, 2);
  d << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(Factorization(from_dense(d)), SingularMatrixError);
}

TEST_CASE("dimension checks") {
  SparseMatrixC a(3, 2);
  CHECK_THROWS_AS(Factorization{a}, ValidationError);
  SparseMatrixC i(3, 3);
  i.setIdentity();
  CHECK_THROWS_AS(solve(i, Eigen::VectorXcd::Ones(2)), ValidationError);
}

TEST_CASE("factorization is reusable and accurate on a larger system") {
  const int n = 200;
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, cplx(4.0, 0.1));
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, cplx(-1.0, 0.0));
      t.emplace_back(i + 1, i, cplx(-1.0, 0.0));
    }
  }
  SparseMatrixC a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  const Factorization f(a);
  CHECK(f.dimension() == n);
  CHECK(f.rcond() > 1e-3);
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    b(k * 50) = cplx(1, -k);
    const Eigen::VectorXcd x = f.solve(b);
    CHECK((a * x - b).norm() <= kSolveResidualTol * b.norm());
  }
  CHECK(f.solve(Eigen::VectorXcd::Zero(n)).norm() == 0.0);
}
