#include "densela.hpp"

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "quadd.hpp"
#include "rng.hpp"

namespace fgl {

double ctx_dot(const FpContext& ctx, const double* x, const double* y, int n) {
  switch (ctx.format().kind()) {
    case PrecisionFormat::Kind::native_double: {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += x[i] * y[i];
      return acc;
    }
    case PrecisionFormat::Kind::pair: {
      qd acc;
      for (int i = 0; i < n; ++i) acc = qd_add(acc, qdet::two_prod(x[i], y[i]));
      return acc.value();
    }
    default: {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc = ctx.add(acc, ctx.mul(x[i], y[i]));
      return acc;
    }
  }
}

DenseMatrix round_matrix(const FpContext& ctx, const DenseMatrix& A) {
  DenseMatrix B = A;
  if (ctx.format().kind() == PrecisionFormat::Kind::simulated)
    for (double& v : B.data()) v = ctx.round(v);
  return B;
}

static Vector round_vector(const FpContext& ctx, const Vector& x) {
  Vector y = x;
  if (ctx.format().kind() == PrecisionFormat::Kind::simulated)
    for (double& v : y) v = ctx.round(v);
  return y;
}

Vector matvec(const FpContext& ctx, const DenseMatrix& A, const Vector& x) {
  Vector xr = round_vector(ctx, x);
  Vector y(A.rows());
  for (int i = 0; i < A.rows(); ++i)
    y[i] = ctx_dot(ctx, A.row(i), xr.data(), A.cols());
  return y;
}

LUFactors lu_factor(const FpContext& ctx, const DenseMatrix& A) {
  const int n = A.rows();
  DenseMatrix B = round_matrix(ctx, A);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(B(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(B(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0)
      throw SingularInFormatError(
          "lu_factor: pivot column " + std::to_string(k + 1) +
              " is zero in format " + ctx.format().name(),
          ctx.format().name());
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(B(k, j), B(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      double l = ctx.div(B(i, k), B(k, k));
      B(i, k) = l;
      for (int j = k + 1; j < n; ++j)
        B(i, j) = ctx.sub(B(i, j), ctx.mul(l, B(k, j)));
    }
  }

  LUFactors f;
  f.L = DenseMatrix(n, n);
  f.U = DenseMatrix(n, n);
  for (int i = 0; i < n; ++i) {
    f.L(i, i) = 1.0;
    for (int j = 0; j < i; ++j) f.L(i, j) = B(i, j);
    for (int j = i; j < n; ++j) f.U(i, j) = B(i, j);
  }
  f.perm = std::move(perm);
  f.factor_format = &ctx.format();
  return f;
}

Vector tri_solve(const FpContext& ctx, const DenseMatrix& T, const Vector& b, Tri side) {
  const int n = T.rows();
  Vector br = round_vector(ctx, b);
  Vector x(n);
  const bool pair = ctx.format().kind() == PrecisionFormat::Kind::pair;

  auto solve_row = [&](int i, int lo, int hi) {
    if (T(i, i) == 0.0)
      throw SingularInFormatError(
          "tri_solve: zero diagonal at row " + std::to_string(i + 1) +
              " in format " + ctx.format().name(),
          ctx.format().name());
    if (pair) {
      qd acc(br[i]);
      for (int j = lo; j < hi; ++j)
        acc = qd_sub(acc, qdet::two_prod(T(i, j), x[j]));
      x[i] = qd_div(acc, qd(T(i, i))).value();
    } else {
      double acc = br[i];
      for (int j = lo; j < hi; ++j)
        acc = ctx.sub(acc, ctx.mul(T(i, j), x[j]));
      x[i] = ctx.div(acc, T(i, i));
    }
  };

  if (side == Tri::lower) {
    for (int i = 0; i < n; ++i) solve_row(i, 0, i);
  } else {
    for (int i = n - 1; i >= 0; --i) solve_row(i, i + 1, n);
  }
  return x;
}

MgsResult mgs_orthogonalize(const FpContext& ctx, Vector w,
                            const std::vector<Vector>& basis) {
  const int n = static_cast<int>(w.size());
  Vector h(basis.size());
  for (size_t i = 0; i < basis.size(); ++i) {
    const Vector& v = basis[i];
    h[i] = ctx_dot(ctx, v.data(), w.data(), n);
    for (int j = 0; j < n; ++j)
      w[j] = ctx.sub(w[j], ctx.mul(h[i], v[j]));
  }
  return {std::move(w), std::move(h)};
}

GivensRotation givens(const FpContext& ctx, double a, double b) {
  GivensRotation g;
  const double u = ctx.format().unit_roundoff();
  if (b == 0.0) {
    g = {1.0, 0.0, a, false};
  } else if (a == 0.0) {
    g = {0.0, 1.0, b, false};
  } else {
    double r = ctx.sqrt(ctx.add(ctx.mul(a, a), ctx.mul(b, b)));
    g.c = ctx.div(a, r);
    g.s = ctx.div(b, r);
    g.r = r;
  }
  g.sine_near_one = std::fabs(g.s) >= 1.0 - u;
  return g;
}

double norm2_ctx(const FpContext& ctx, const Vector& x) {
  switch (ctx.format().kind()) {
    case PrecisionFormat::Kind::native_double: {
      double acc = 0.0;
      for (double v : x) acc += v * v;
      return std::sqrt(acc);
    }
    case PrecisionFormat::Kind::pair: {
      qd acc;
      for (double v : x) acc = qd_add(acc, qdet::two_prod(v, v));
      return qd_sqrt(acc).value();
    }
    default: {
      double acc = 0.0;
      for (double v : x) acc = ctx.add(acc, ctx.mul(v, v));
      return ctx.sqrt(acc);
    }
  }
}

double norm2(std::span<const double> x) {
  qd acc;
  for (double v : x) acc = qd_add(acc, qdet::two_prod(v, v));
  return qd_sqrt(acc).value();
}

EstimateResult norm2_est(const LinearOp& apply, const LinearOp& applyT,
                         int n_domain, int n_range, uint64_t seed, double tol,
                         int maxit) {
  Rng rng(mix_seed(seed, 0x5e07));
  Vector x(n_domain), y(n_range), z(n_domain);
  for (double& v : x) v = rng.gaussian();
  double nx = norm2(x);
  if (nx == 0.0) x[0] = 1.0, nx = 1.0;
  for (double& v : x) v /= nx;

  double sigma_prev = -1.0, sigma = 0.0;
  for (int it = 0; it < maxit; ++it) {
    apply(x.data(), y.data());
    sigma = norm2(y);
    if (sigma == 0.0) return {0.0, true};
    applyT(y.data(), z.data());
    double nz = norm2(z);
    if (nz == 0.0) return {sigma, true};
    for (int i = 0; i < n_domain; ++i) x[i] = z[i] / nz;
    if (sigma_prev >= 0.0 && std::fabs(sigma - sigma_prev) <= tol * sigma)
      return {sigma, true};
    sigma_prev = sigma;
  }
  return {sigma, false};
}

EstimateResult norm2_est(const DenseMatrix& B, uint64_t seed) {
  return norm2_est(
      [&](const double* in, double* out) {
        Vector r = matvec_d(B, std::span<const double>(in, B.cols()));
        std::copy(r.begin(), r.end(), out);
      },
      [&](const double* in, double* out) {
        Vector r = matvec_T_d(B, std::span<const double>(in, B.rows()));
        std::copy(r.begin(), r.end(), out);
      },
      B.cols(), B.rows(), seed);
}

CondResult cond2_est(const LinearOp& apply, const LinearOp& applyT,
                     const LinearOp& solve, const LinearOp& solveT, int n,
                     uint64_t seed) {
  EstimateResult fwd = norm2_est(apply, applyT, n, n, mix_seed(seed, 1));
  EstimateResult inv = norm2_est(solve, solveT, n, n, mix_seed(seed, 2));
  return {fwd.value, inv.value, fwd.value * inv.value,
          fwd.converged && inv.converged};
}

EstimateResult cond2_rect(const DenseMatrix& C, uint64_t seed) {
  const int n = C.rows(), m = C.cols();
  // Gram matrix G = C^T C in pair precision: near convergence kappa(G) =
  // kappa(C)^2 far exceeds what double can resolve.
  std::vector<qd> G(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      qd acc;
      for (int r = 0; r < n; ++r)
        acc = qd_add(acc, qdet::two_prod(C(r, i), C(r, j)));
      G[static_cast<size_t>(i) * m + j] = acc;
      G[static_cast<size_t>(j) * m + i] = acc;
    }

  auto gapply = [&](const double* in, double* out) {
    for (int i = 0; i < m; ++i) {
      qd acc;
      for (int j = 0; j < m; ++j)
        acc = qd_add(acc, qd_mul(G[static_cast<size_t>(i) * m + j], qd(in[j])));
      out[i] = acc.value();
    }
  };
  EstimateResult lmax = norm2_est(gapply, gapply, m, m, mix_seed(seed, 3));

  QdLU f = qd_lu_factor(G, m);
  auto ginv = [&](const double* in, double* out) {
    QVector rhs(m);
    for (int i = 0; i < m; ++i) rhs[i] = qd(in[i]);
    QVector r = qd_lu_solve(f, rhs);
    for (int i = 0; i < m; ++i) out[i] = r[i].value();
  };
  EstimateResult linv = norm2_est(ginv, ginv, m, m, mix_seed(seed, 4));

  return {std::sqrt(lmax.value * linv.value), lmax.converged && linv.converged};
}

Vector matvec_d(const DenseMatrix& A, std::span<const double> x) {
  Vector y(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    const double* row = A.row(i);
    double acc = 0.0;
    for (int j = 0; j < A.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

Vector matvec_T_d(const DenseMatrix& A, std::span<const double> x) {
  Vector y(A.cols(), 0.0);
  for (int i = 0; i < A.rows(); ++i) {
    const double* row = A.row(i);
    for (int j = 0; j < A.cols(); ++j) y[j] += row[j] * x[i];
  }
  return y;
}

Vector tri_solve_d(const DenseMatrix& T, std::span<const double> b, Tri side) {
  const int n = T.rows();
  Vector x(n);
  if (side == Tri::lower) {
    for (int i = 0; i < n; ++i) {
      double acc = b[i];
      for (int j = 0; j < i; ++j) acc -= T(i, j) * x[j];
      if (T(i, i) == 0.0)
        throw SingularInFormatError("tri_solve_d: zero diagonal", "double");
      x[i] = acc / T(i, i);
    }
  } else {
    for (int i = n - 1; i >= 0; --i) {
      double acc = b[i];
      for (int j = i + 1; j < n; ++j) acc -= T(i, j) * x[j];
      if (T(i, i) == 0.0)
        throw SingularInFormatError("tri_solve_d: zero diagonal", "double");
      x[i] = acc / T(i, i);
    }
  }
  return x;
}

Vector tri_solve_T_d(const DenseMatrix& T, std::span<const double> b, Tri side) {
  // T^T x = b: a lower T acts like an upper factor and vice versa
  const int n = T.rows();
  Vector x(n);
  if (side == Tri::lower) {
    for (int i = n - 1; i >= 0; --i) {
      double acc = b[i];
      for (int j = i + 1; j < n; ++j) acc -= T(j, i) * x[j];
      if (T(i, i) == 0.0)
        throw SingularInFormatError("tri_solve_T_d: zero diagonal", "double");
      x[i] = acc / T(i, i);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      double acc = b[i];
      for (int j = 0; j < i; ++j) acc -= T(j, i) * x[j];
      if (T(i, i) == 0.0)
        throw SingularInFormatError("tri_solve_T_d: zero diagonal", "double");
      x[i] = acc / T(i, i);
    }
  }
  return x;
}

DenseMatrix mat_mul(const DenseMatrix& A, const DenseMatrix& B) {
  DenseMatrix C(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int k = 0; k < A.cols(); ++k) {
      double a = A(i, k);
      if (a == 0.0) continue;
      const double* brow = B.row(k);
      double* crow = C.row(i);
      for (int j = 0; j < B.cols(); ++j) crow[j] += a * brow[j];
    }
  return C;
}

DenseMatrix mat_abs(const DenseMatrix& A) {
  DenseMatrix B = A;
  for (double& v : B.data()) v = std::fabs(v);
  return B;
}

DenseMatrix mat_add(const DenseMatrix& A, const DenseMatrix& B) {
  DenseMatrix C = A;
  for (size_t i = 0; i < C.data().size(); ++i) C.data()[i] += B.data()[i];
  return C;
}

DenseMatrix abs_inverse(const DenseMatrix& T, Tri side) {
  const int n = T.rows();
  DenseMatrix X(n, n);
  Vector e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    Vector col = tri_solve_d(T, e, side);
    for (int i = 0; i < n; ++i) X(i, j) = std::fabs(col[i]);
    e[j] = 0.0;
  }
  return X;
}

LUFactors lu_d(const DenseMatrix& A) {
  StatusFlags flags;
  FpContext ctx(double_format(), flags);
  return lu_factor(ctx, A);
}

Vector lu_solve_d(const LUFactors& f, std::span<const double> b) {
  const int n = f.L.rows();
  Vector pb(n);
  for (int i = 0; i < n; ++i) pb[i] = b[f.perm[i]];
  Vector y = tri_solve_d(f.L, pb, Tri::lower);
  return tri_solve_d(f.U, y, Tri::upper);
}

Vector lu_solve_T_d(const LUFactors& f, std::span<const double> b) {
  // A = P^T L U, so A^T x = b is U^T w = b, L^T y = w, x = P^T y
  const int n = f.L.rows();
  Vector w = tri_solve_T_d(f.U, b, Tri::upper);
  Vector y = tri_solve_T_d(f.L, w, Tri::lower);
  Vector x(n);
  for (int i = 0; i < n; ++i) x[f.perm[i]] = y[i];
  return x;
}

}  // namespace fgl
