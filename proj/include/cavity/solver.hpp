#pragma once

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cavity/scenario.hpp"

namespace cavity {

using SparseMatrixC = Eigen::SparseMatrix<cplx>;

/// Sparse LU of a square complex matrix (UMFPACK, threshold partial pivoting 0.1).
/// Immutable after construction; solve() may be called concurrently.
class Factorization {
 public:
  explicit Factorization(const SparseMatrixC& matrix);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  int dimension() const { return n_; }
  /// Reciprocal pivot growth estimate min|U_ii| / max|U_ii|.
  double rcond() const { return rcond_; }

  /// Solves and verifies ||Ax - b|| <= 1e-10 ||b||, refining once if needed.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
  double rcond_ = 0.0;
};

Eigen::VectorXcd solve(const SparseMatrixC& matrix, const Eigen::VectorXcd& rhs);

inline constexpr double kSolveResidualTol = 1e-10;
inline constexpr double kZeroPivotTol = 1e-14;

}  // namespace cavity
