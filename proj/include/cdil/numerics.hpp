#pragma once

// Dense complex linear algebra and polynomial root finding.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdil {

using cplx = std::complex<double>;

/// Input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation at a pole or outside the domain of a map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double psd_tol = 1e-9;
  double residual_tol = 1e-6;
  double root_tol = 1e-10;
  std::int64_t max_iter = 200000;

  void validate() const;
};

/// Row-major dense complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> d);
  static ComplexMatrix from_rows(const std::vector<std::vector<cplx>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix conj() const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  /// ||H - H*||_max <= tol * (1 + ||H||_max).
  bool is_hermitian(double tol = 1e-12) const;
  /// (H + H*) / 2.
  ComplexMatrix hermitian_part() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

/// Entrywise (Hadamard) product.
ComplexMatrix schur_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Re tr(A* B), the real Frobenius inner product on Hermitian matrices.
double inner_real(const ComplexMatrix& a, const ComplexMatrix& b);

/// tr(A* B).
cplx inner(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix (values ascending).
HermitianEigen herm_eig(const ComplexMatrix& h);

/// Eigenvalues only (ascending); skips the eigenvector accumulation.
std::vector<double> herm_eigvals(const ComplexMatrix& h);

/// lambda_min(H) >= -psd_tol * (1 + max |lambda|).
bool is_psd(const ComplexMatrix& h, const Tolerances& tol = {});

/// Nearest PSD matrix in Frobenius norm: V diag(max(lambda, 0)) V*.
ComplexMatrix psd_project(const ComplexMatrix& h);

/// Largest eigenvalue of a Hermitian matrix.
double lambda_max(const ComplexMatrix& h);

/// Eigenvalues of a general square complex matrix (balanced Hessenberg QR).
std::vector<cplx> general_eigvals(ComplexMatrix a);

/// Solves A X = B by LU with partial pivoting; throws NumericError if A is
/// numerically singular.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix inverse(const ComplexMatrix& a);
/// LU determinant with partial pivoting (0 for exactly singular input).
cplx determinant(const ComplexMatrix& a);

/// Orthonormal basis (as columns) of {v : A v = 0}. Rows whose residual after
/// orthogonalization falls below rank_tol times their norm count as dependent.
ComplexMatrix null_space(const ComplexMatrix& a, double rank_tol = 1e-10);

// Polynomials are stored in ascending order: coeffs[k] multiplies z^k.

cplx poly_eval(std::span<const cplx> coeffs, cplx z);
cplx poly_deriv_eval(std::span<const cplx> coeffs, cplx z);
std::vector<cplx> poly_mul(std::span<const cplx> a, std::span<const cplx> b);
/// Monic polynomial prod (z - r_j), ascending coefficients.
std::vector<cplx> poly_from_roots(std::span<const cplx> roots);

struct RootOptions {
  double cluster_tol = 1e-6;
  int polish_steps = 4;
};

/// All roots with multiplicity via the companion matrix. Roots closer than
/// cluster_tol are merged to their mean and returned repeated.
std::vector<cplx> poly_roots(std::span<const cplx> coeffs, const Tolerances& tol = {},
                             const RootOptions& opts = {});

/// |p(root)| relative to sum_k |c_k| |root|^k.
double root_residual(std::span<const cplx> coeffs, cplx root);

}  // namespace cdil
