#include "oracle.hpp"

#include <cmath>

#include "errors.hpp"

namespace fgl {

QVector qd_promote(std::span<const double> x) {
  QVector y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = qd(x[i]);
  return y;
}

Vector qd_demote(const QVector& x) {
  Vector y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i].value();
  return y;
}

QVector qd_matvec(const DenseMatrix& A, std::span<const double> x) {
  QVector y(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    const double* row = A.row(i);
    qd acc;
    for (int j = 0; j < A.cols(); ++j)
      acc = qd_add(acc, qdet::two_prod(row[j], x[j]));
    y[i] = acc;
  }
  return y;
}

QVector qd_matvec(const DenseMatrix& A, const QVector& x) {
  QVector y(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    const double* row = A.row(i);
    qd acc;
    for (int j = 0; j < A.cols(); ++j)
      acc = qd_add(acc, qd_mul(qd(row[j]), x[j]));
    y[i] = acc;
  }
  return y;
}

QVector qd_sub_vec(const QVector& a, const QVector& b) {
  QVector c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = qd_sub(a[i], b[i]);
  return c;
}

qd qd_norm2(const QVector& x) {
  qd acc;
  for (const qd& v : x) acc = qd_add(acc, qd_mul(v, v));
  return qd_sqrt(acc);
}

double qd_norm2_d(const QVector& x) { return qd_norm2(x).value(); }

QVector qd_tri_solve(const DenseMatrix& T, const QVector& b, Tri side) {
  const int n = T.rows();
  QVector x(n);
  auto solve_row = [&](int i, int lo, int hi) {
    if (T(i, i) == 0.0)
      throw SingularInFormatError("qd_tri_solve: zero diagonal", "quad");
    qd acc = b[i];
    for (int j = lo; j < hi; ++j)
      acc = qd_sub(acc, qd_mul(qd(T(i, j)), x[j]));
    x[i] = qd_div(acc, qd(T(i, i)));
  };
  if (side == Tri::lower) {
    for (int i = 0; i < n; ++i) solve_row(i, 0, i);
  } else {
    for (int i = n - 1; i >= 0; --i) solve_row(i, i + 1, n);
  }
  return x;
}

QdLU qd_lu_factor(const DenseMatrix& A) {
  const int n = A.rows();
  std::vector<qd> a(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = qd(A(i, j));
  return qd_lu_factor(std::move(a), n);
}

QdLU qd_lu_factor(std::vector<qd> a, int n) {
  QdLU f;
  f.n = n;
  f.a = std::move(a);
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(f.at(k, k).hi);
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(f.at(i, k).hi);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0 && f.at(piv, k).lo == 0.0)
      throw SingularInFormatError("qd_lu_factor: zero pivot", "quad");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(f.at(k, j), f.at(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      qd l = qd_div(f.at(i, k), f.at(k, k));
      f.at(i, k) = l;
      for (int j = k + 1; j < n; ++j)
        f.at(i, j) = qd_sub(f.at(i, j), qd_mul(l, f.at(k, j)));
    }
  }
  return f;
}

QVector qd_lu_solve(const QdLU& f, const QVector& b) {
  const int n = f.n;
  QVector y(n);
  for (int i = 0; i < n; ++i) {
    qd acc = b[f.perm[i]];
    for (int j = 0; j < i; ++j) acc = qd_sub(acc, qd_mul(f.at(i, j), y[j]));
    y[i] = acc;
  }
  QVector x(n);
  for (int i = n - 1; i >= 0; --i) {
    qd acc = y[i];
    for (int j = i + 1; j < n; ++j) acc = qd_sub(acc, qd_mul(f.at(i, j), x[j]));
    x[i] = qd_div(acc, f.at(i, i));
  }
  return x;
}

}  // namespace fgl
