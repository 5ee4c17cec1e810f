#include "cavity/solver.hpp"

#include <suitesparse/umfpack.h>

#include <string>
#include <vector>

#include "cavity/errors.hpp"

namespace cavity {

struct Factorization::Impl {
  SparseMatrixC a;  // compressed copy, kept for residual checks
  void* numeric = nullptr;
  std::vector<double> control = std::vector<double>(UMFPACK_CONTROL);

  ~Impl() {
    if (numeric) umfpack_zi_free_numeric(&numeric);
  }

  const double* values() const { return reinterpret_cast<const double*>(a.valuePtr()); }

  Eigen::VectorXcd raw_solve(const Eigen::VectorXcd& b) const {
    Eigen::VectorXcd x(b.size());
    std::vector<double> info(UMFPACK_INFO);
    const int status =
        umfpack_zi_solve(UMFPACK_A, a.outerIndexPtr(), a.innerIndexPtr(), values(), nullptr,
                         reinterpret_cast<double*>(x.data()), nullptr, reinterpret_cast<const double*>(b.data()),
                         nullptr, numeric, control.data(), info.data());
    if (status == UMFPACK_WARNING_singular_matrix) throw SingularMatrixError("singular matrix detected during solve");
    if (status != UMFPACK_OK) throw NumericalError("UMFPACK solve failed with status " + std::to_string(status));
    return x;
  }
};

Factorization::Factorization(const SparseMatrixC& matrix) : impl_(std::make_unique<Impl>()) {
  if (matrix.rows() != matrix.cols()) {
    throw ValidationError("matrix is not square (" + std::to_string(matrix.rows()) + "x" +
                          std::to_string(matrix.cols()) + ")");
  }
  n_ = int(matrix.rows());
  auto& a = impl_->a;
  a = matrix;
  a.prune(cplx(0.0));
  a.makeCompressed();

  std::vector<char> row_used(n_, 0);
  for (int c = 0; c < n_; ++c) {
    if (a.outerIndexPtr()[c] == a.outerIndexPtr()[c + 1]) {
      throw SingularMatrixError("structurally singular matrix: column " + std::to_string(c) + " is empty");
    }
    for (SparseMatrixC::InnerIterator it(a, c); it; ++it) row_used[it.row()] = 1;
  }
  for (int r = 0; r < n_; ++r) {
    if (!row_used[r]) throw SingularMatrixError("structurally singular matrix: row " + std::to_string(r) + " is empty");
  }
  if (n_ == 0) return;

  umfpack_zi_defaults(impl_->control.data());
  impl_->control[UMFPACK_PIVOT_TOLERANCE] = 0.1;
  impl_->control[UMFPACK_IRSTEP] = 0;  // refinement is done explicitly in solve()

  std::vector<double> info(UMFPACK_INFO);
  void* symbolic = nullptr;
  int status = umfpack_zi_symbolic(n_, n_, a.outerIndexPtr(), a.innerIndexPtr(), impl_->values(), nullptr, &symbolic,
                                   impl_->control.data(), info.data());
  if (status != UMFPACK_OK) {
    if (symbolic) umfpack_zi_free_symbolic(&symbolic);
    throw NumericalError("UMFPACK symbolic analysis failed with status " + std::to_string(status));
  }
  status = umfpack_zi_numeric(a.outerIndexPtr(), a.innerIndexPtr(), impl_->values(), nullptr, symbolic,
                              &impl_->numeric, impl_->control.data(), info.data());
  umfpack_zi_free_symbolic(&symbolic);
  if (status == UMFPACK_WARNING_singular_matrix) throw SingularMatrixError("matrix is singular (zero pivot)");
  if (status != UMFPACK_OK) throw NumericalError("UMFPACK factorization failed with status " + std::to_string(status));
  rcond_ = info[UMFPACK_RCOND];
  if (!(rcond_ > kZeroPivotTol)) {
    throw SingularMatrixError("matrix is numerically singular (pivot ratio " + std::to_string(rcond_) + ")");
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

Eigen::VectorXcd Factorization::solve(const Eigen::VectorXcd& rhs) const {
  if (rhs.size() != n_) {
    throw ValidationError("rhs dimension " + std::to_string(rhs.size()) + " does not match matrix dimension " +
                          std::to_string(n_));
  }
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXcd::Zero(n_);
  Eigen::VectorXcd x = impl_->raw_solve(rhs);
  Eigen::VectorXcd r = rhs - impl_->a * x;
  double rel = r.norm() / bnorm;
  if (rel > kSolveResidualTol) {
    x += impl_->raw_solve(r);
    r = rhs - impl_->a * x;
    rel = r.norm() / bnorm;
  }
  if (!(rel <= kSolveResidualTol)) {
    throw NumericalError("linear solve residual " + std::to_string(rel) + " exceeds tolerance");
  }
  return x;
}

Eigen::VectorXcd solve(const SparseMatrixC& matrix, const Eigen::VectorXcd& rhs) {
  return Factorization(matrix).solve(rhs);
}

}  // namespace cavity
