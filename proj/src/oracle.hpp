#pragma once

// Compensated-pair linear algebra: the high-precision side of every
// backward/forward-error measurement. Deliberately separate from the
// simulated-precision kernels it is used to check.

#include <span>
#include <vector>

#include "densela.hpp"
#include "quadd.hpp"

namespace fgl {

using QVector = std::vector<qd>;

QVector qd_promote(std::span<const double> x);
Vector qd_demote(const QVector& x);

QVector qd_matvec(const DenseMatrix& A, std::span<const double> x);
QVector qd_matvec(const DenseMatrix& A, const QVector& x);
QVector qd_sub_vec(const QVector& a, const QVector& b);
qd qd_norm2(const QVector& x);
double qd_norm2_d(const QVector& x);

QVector qd_tri_solve(const DenseMatrix& T, const QVector& b, Tri side);

// packed LU (unit L below the diagonal) in pair arithmetic
struct QdLU {
  int n = 0;
  std::vector<qd> a;  // row-major n x n
  std::vector<int> perm;
  qd& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const qd& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

QdLU qd_lu_factor(const DenseMatrix& A);
QdLU qd_lu_factor(std::vector<qd> a, int n);
QVector qd_lu_solve(const QdLU& f, const QVector& b);

}  // namespace fgl
