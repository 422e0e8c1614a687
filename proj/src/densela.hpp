#pragma once

// Dense kernels parameterized by an arithmetic context. Storage is always
// binary64; a context constrains arithmetic by rounding every elementary
// operation. Accumulation order is fixed left-to-right everywhere so runs
// are bit-reproducible.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "precision.hpp"

namespace fgl {

using Vector = std::vector<double>;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        a_(static_cast<size_t>(rows) * cols, fill) {}

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double* row(int i) { return a_.data() + static_cast<size_t>(i) * cols_; }
  const double* row(int i) const { return a_.data() + static_cast<size_t>(i) * cols_; }
  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

enum class Tri { lower, upper };

struct LUFactors {
  DenseMatrix L;          // unit lower triangular, explicit unit diagonal
  DenseMatrix U;          // upper triangular
  std::vector<int> perm;  // (PA)(i,:) == A(perm[i],:)
  const PrecisionFormat* factor_format = &double_format();
};

// ---- context-precision kernels (Algorithm arithmetic) ----

// Left-to-right fl dot product; compensated pairs when ctx is the quad format.
double ctx_dot(const FpContext& ctx, const double* x, const double* y, int n);

// y = A x with every multiply-add in ctx. x is rounded onto the grid on
// entry; A's entries are the caller's responsibility (round_matrix).
Vector matvec(const FpContext& ctx, const DenseMatrix& A, const Vector& x);

DenseMatrix round_matrix(const FpContext& ctx, const DenseMatrix& A);

// Right-looking Gaussian elimination with partial pivoting; A is rounded
// onto the grid on entry. Throws SingularInFormatError when a pivot column
// is exactly zero in the format.
LUFactors lu_factor(const FpContext& ctx, const DenseMatrix& A);

// Forward/backward substitution in ctx. T is assumed on the grid already;
// b is rounded on entry. Throws SingularInFormatError on a zero diagonal.
Vector tri_solve(const FpContext& ctx, const DenseMatrix& T, const Vector& b, Tri side);

struct MgsResult {
  Vector w;  // updated vector after one modified Gram-Schmidt pass
  Vector h;  // projection coefficients h_{1..k}
};
MgsResult mgs_orthogonalize(const FpContext& ctx, Vector w,
                            const std::vector<Vector>& basis);

struct GivensRotation {
  double c = 1.0, s = 0.0, r = 0.0;
  bool sine_near_one = false;  // |s| >= 1 - u
};
GivensRotation givens(const FpContext& ctx, double a, double b);

// norm of x computed in ctx (Algorithm 1 computes norms in precision u)
double norm2_ctx(const FpContext& ctx, const Vector& x);

// ---- diagnostic-precision helpers (double) ----

// 2-norm with compensated accumulation.
double norm2(std::span<const double> x);

struct EstimateResult {
  double value = 0.0;
  bool converged = true;
};

using LinearOp = std::function<void(const double* in, double* out)>;

// Power iteration on B^T B from a seeded start; stops when the estimate's
// relative change drops below tol or after maxit sweeps. B maps R^n_domain
// to R^n_range.
EstimateResult norm2_est(const LinearOp& apply, const LinearOp& applyT,
                         int n_domain, int n_range, uint64_t seed,
                         double tol = 1e-8, int maxit = 500);
EstimateResult norm2_est(const DenseMatrix& B, uint64_t seed);

struct CondResult {
  double norm = 0.0;      // ||B||
  double norm_inv = 0.0;  // ||B^{-1}||
  double kappa = 0.0;
  bool converged = true;
};
CondResult cond2_est(const LinearOp& apply, const LinearOp& applyT,
                     const LinearOp& solve, const LinearOp& solveT, int n,
                     uint64_t seed);

// 2-norm condition number of a rectangular matrix via its Gram matrix.
EstimateResult cond2_rect(const DenseMatrix& C, uint64_t seed);

// plain double kernels used by estimators and explicit-matrix assembly
Vector matvec_d(const DenseMatrix& A, std::span<const double> x);
Vector matvec_T_d(const DenseMatrix& A, std::span<const double> x);
Vector tri_solve_d(const DenseMatrix& T, std::span<const double> b, Tri side);
// solves T^T x = b
Vector tri_solve_T_d(const DenseMatrix& T, std::span<const double> b, Tri side);
DenseMatrix mat_mul(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix mat_abs(const DenseMatrix& A);
DenseMatrix mat_add(const DenseMatrix& A, const DenseMatrix& B);
// |T^{-1}| formed by n columnwise substitutions in double
DenseMatrix abs_inverse(const DenseMatrix& T, Tri side);

LUFactors lu_d(const DenseMatrix& A);
Vector lu_solve_d(const LUFactors& f, std::span<const double> b);
// solves A^T x = b given PA = LU
Vector lu_solve_T_d(const LUFactors& f, std::span<const double> b);

}  // namespace fgl
