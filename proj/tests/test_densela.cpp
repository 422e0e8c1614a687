#include <doctest.h>

#include <cmath>

#include "densela.hpp"
#include "oracle.hpp"
#include "rng.hpp"

using namespace fgl;

namespace {

StatusFlags g_flags;

FpContext ctx(const PrecisionFormat& f) { return FpContext(f, g_flags); }

DenseMatrix random_matrix(int n, Rng& rng, double scale = 1.0) {
  DenseMatrix A(n, n);
  for (double& v : A.data()) v = scale * (2.0 * rng.uniform01() - 1.0);
  return A;
}

Vector random_vector(int n, Rng& rng) {
  Vector x(n);
  for (double& v : x) v = 2.0 * rng.uniform01() - 1.0;
  return x;
}

}  // namespace

TEST_CASE("matvec: identity and low-order absorption") {
  DenseMatrix I3 = DenseMatrix::identity(3);
  Vector x{1.0, 2.0, 3.0};
  Vector y = matvec(ctx(double_format()), I3, x);
  CHECK(y == x);

  DenseMatrix A(1, 2);
  A(0, 0) = 1.0;
  A(0, 1) = 1.0;
  Vector z{1.0, 0x1.0p-12};
  Vector r = matvec(ctx(half_format()), A, z);
  CHECK(r[0] == 1.0);  // 2^-12 is below the half-ulp of 1 in binary16
}

TEST_CASE("matvec(single) stays within the error model vs the quad oracle") {
  Rng rng(11);
  DenseMatrix A = random_matrix(5, rng);
  StatusFlags fl;
  FpContext cs(single_format(), fl);
  DenseMatrix As = round_matrix(cs, A);
  Vector e1{1.0, 0.0, 0.0, 0.0, 0.0};
  Vector y = matvec(cs, As, e1);
  // picking column 1 of the rounded matrix is exact up to one rounding
  for (int i = 0; i < 5; ++i)
    CHECK(y[i] == round_to(single_format(), As(i, 0)));

  Vector x = random_vector(5, rng);
  Vector ys = matvec(cs, As, x);
  QVector yq = qd_matvec(As, x);
  for (int i = 0; i < 5; ++i) {
    double exact = yq[i].value();
    CHECK(std::fabs(ys[i] - exact) <= 5.0 * 0x1.0p-24 * qd_norm2_d(qd_matvec(mat_abs(As), x)));
  }
}

TEST_CASE("lu_factor: identity, singular-in-format, and residual bound") {
  Rng rng(21);
  LUFactors f = lu_factor(ctx(double_format()), DenseMatrix::identity(4));
  for (int i = 0; i < 4; ++i) {
    CHECK(f.perm[i] == i);
    for (int j = 0; j < 4; ++j) {
      CHECK(f.L(i, j) == (i == j ? 1.0 : 0.0));
      CHECK(f.U(i, j) == (i == j ? 1.0 : 0.0));
    }
  }

  DenseMatrix tiny(3, 3);
  for (int i = 0; i < 3; ++i) tiny(i, i) = 1e-9;  // below the half subnormal floor
  CHECK_THROWS_AS(lu_factor(ctx(half_format()), tiny), SingularInFormatError);

  // well-conditioned random 10x10 in single: ||PA - LU|| / ||A|| <= 100 u_s
  DenseMatrix A = random_matrix(10, rng);
  for (int i = 0; i < 10; ++i) A(i, i) += 5.0;  // keep it well conditioned
  StatusFlags fl;
  FpContext cs(single_format(), fl);
  DenseMatrix As = round_matrix(cs, A);
  LUFactors fs = lu_factor(cs, A);
  // quad residual of PA - L U
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      qd acc(As(fs.perm[i], j));
      for (int k = 0; k < 10; ++k)
        acc = qd_sub(acc, qd_mul(qd(fs.L(i, k)), qd(fs.U(k, j))));
      worst = std::max(worst, std::fabs(acc.value()));
    }
  double na = norm2_est(A, 1).value;
  CHECK(worst / na <= 100.0 * 0x1.0p-24);
}

TEST_CASE("tri_solve: exact cases and the half example") {
  DenseMatrix I = DenseMatrix::identity(3);
  Vector b{4.0, 5.0, 6.0};
  CHECK(tri_solve(ctx(double_format()), I, b, Tri::lower) == b);

  DenseMatrix L(2, 2);
  L(0, 0) = 1.0;
  L(1, 0) = 2048.0;
  L(1, 1) = 1.0;
  Vector rhs{1.0, 0.0};
  Vector x = tri_solve(ctx(half_format()), L, rhs, Tri::lower);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == -2048.0);

  DenseMatrix Z(2, 2);
  Z(0, 0) = 1.0;  // zero diagonal at (1,1)
  CHECK_THROWS_AS(tri_solve(ctx(double_format()), Z, rhs, Tri::lower),
                  SingularInFormatError);
}

TEST_CASE("tri_solve(single) forward error vs the quad substitution") {
  Rng rng(31);
  DenseMatrix A = random_matrix(10, rng);
  for (int i = 0; i < 10; ++i) A(i, i) += 5.0;
  StatusFlags fl;
  FpContext cs(single_format(), fl);
  LUFactors f = lu_factor(cs, A);
  Vector e1(10, 0.0);
  e1[0] = 1.0;
  Vector xs = tri_solve(cs, f.L, e1, Tri::lower);
  QVector xq = qd_tri_solve(f.L, qd_promote(e1), Tri::lower);
  double diff = qd_norm2_d(qd_sub_vec(qd_promote(xs), xq));
  double condL = norm2_est(mat_mul(abs_inverse(f.L, Tri::lower), mat_abs(f.L)), 3).value;
  CHECK(diff <= condL * 20.0 * 0x1.0p-24 * qd_norm2_d(xq));
}

TEST_CASE("mgs_orthogonalize: exact orthogonality and self-projection") {
  // orthogonal basis e1, e2 in R^4
  std::vector<Vector> V = {{1, 0, 0, 0}, {0, 1, 0, 0}};
  Vector w{0.0, 0.0, 3.0, 4.0};
  MgsResult r = mgs_orthogonalize(ctx(double_format()), w, V);
  CHECK(r.h[0] == 0.0);
  CHECK(r.h[1] == 0.0);
  CHECK(r.w == w);

  MgsResult s = mgs_orthogonalize(ctx(double_format()), V[0], V);
  CHECK(s.h[0] == 1.0);
  CHECK(norm2(s.w) <= 4.0 * 0x1.0p-53);
}

TEST_CASE("mgs recombination error stays at the working roundoff") {
  Rng rng(41);
  const int n = 20, k = 3;
  // orthonormalize three random vectors in double (two passes)
  std::vector<Vector> V;
  for (int c = 0; c < k; ++c) {
    Vector v = random_vector(n, rng);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& u : V) {
        double h = 0.0;
        for (int i = 0; i < n; ++i) h += u[i] * v[i];
        for (int i = 0; i < n; ++i) v[i] -= h * u[i];
      }
    double nv = norm2(v);
    for (double& t : v) t /= nv;
    V.push_back(v);
  }
  Vector w = random_vector(n, rng);
  StatusFlags fl;
  FpContext cs(single_format(), fl);
  MgsResult r = mgs_orthogonalize(cs, w, V);
  // w' + V h == w up to c(n,k) u_single ||w||
  QVector recon = qd_promote(r.w);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n; ++i)
      recon[i] = qd_add(recon[i], qd_mul(qd(r.h[c]), qd(V[c][i])));
  double err = qd_norm2_d(qd_sub_vec(recon, qd_promote(w)));
  CHECK(err <= 50.0 * 0x1.0p-24 * norm2(w));
}

TEST_CASE("givens rotations") {
  GivensRotation g = givens(ctx(double_format()), 3.0, 4.0);
  CHECK(g.c == 0.6);
  CHECK(g.s == 0.8);
  CHECK(g.r == 5.0);
  CHECK(!g.sine_near_one);

  GivensRotation g1 = givens(ctx(double_format()), 1.0, 0.0);
  CHECK(g1.c == 1.0);
  CHECK(g1.s == 0.0);
  CHECK(g1.r == 1.0);

  GivensRotation g2 = givens(ctx(double_format()), 0.0, 1.0);
  CHECK(g2.c == 0.0);
  CHECK(g2.s == 1.0);
  CHECK(g2.r == 1.0);
  CHECK(g2.sine_near_one);

  // rotation identities hold to working precision
  Rng rng(51);
  for (int i = 0; i < 1000; ++i) {
    double a = 2.0 * rng.uniform01() - 1.0, b = 2.0 * rng.uniform01() - 1.0;
    if (a == 0.0 && b == 0.0) continue;
    GivensRotation gg = givens(ctx(double_format()), a, b);
    CHECK(std::fabs(gg.c * a + gg.s * b - gg.r) <= 10.0 * 0x1.0p-53 * std::fabs(gg.r) + 1e-300);
    CHECK(std::fabs(-gg.s * a + gg.c * b) <= 10.0 * 0x1.0p-53 * std::hypot(a, b));
    CHECK(std::fabs(gg.c * gg.c + gg.s * gg.s - 1.0) <= 8.0 * 0x1.0p-53);
  }
}

TEST_CASE("norm2 and the estimators") {
  Vector v{3.0, 4.0};
  CHECK(norm2(v) == 5.0);

  // diagonal matrix with known singular values
  const int n = 12;
  DenseMatrix D(n, n);
  for (int i = 0; i < n; ++i) D(i, i) = 1.0 / (i + 1.0);
  EstimateResult e = norm2_est(D, 7);
  CHECK(e.converged);
  CHECK(e.value == doctest::Approx(1.0).epsilon(0.01));

  LUFactors f = lu_d(D);
  CondResult c = cond2_est(
      [&](const double* in, double* out) {
        Vector r = matvec_d(D, std::span<const double>(in, n));
        std::copy(r.begin(), r.end(), out);
      },
      [&](const double* in, double* out) {
        Vector r = matvec_T_d(D, std::span<const double>(in, n));
        std::copy(r.begin(), r.end(), out);
      },
      [&](const double* in, double* out) {
        Vector r = lu_solve_d(f, std::span<const double>(in, n));
        std::copy(r.begin(), r.end(), out);
      },
      [&](const double* in, double* out) {
        Vector r = lu_solve_T_d(f, std::span<const double>(in, n));
        std::copy(r.begin(), r.end(), out);
      },
      n, 99);
  CHECK(c.converged);
  CHECK(c.kappa == doctest::Approx(static_cast<double>(n)).epsilon(0.01));

  // identity: kappa = 1 within 1e-6
  DenseMatrix I = DenseMatrix::identity(8);
  LUFactors fi = lu_d(I);
  CondResult ci = cond2_est(
      [&](const double* in, double* out) { std::copy(in, in + 8, out); },
      [&](const double* in, double* out) { std::copy(in, in + 8, out); },
      [&](const double* in, double* out) { std::copy(in, in + 8, out); },
      [&](const double* in, double* out) { std::copy(in, in + 8, out); },
      8, 13);
  CHECK(std::fabs(ci.kappa - 1.0) <= 1e-6);
  (void)fi;
}

TEST_CASE("cond2_rect on a matrix with known singular values") {
  const int n = 30, m = 4;
  Rng rng(61);
  // C = Q * diag(1, 1e-2, 1e-4, 1e-6) with orthonormal Q columns
  std::vector<Vector> Q;
  for (int c = 0; c < m; ++c) {
    Vector v = random_vector(n, rng);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& u : Q) {
        double h = 0.0;
        for (int i = 0; i < n; ++i) h += u[i] * v[i];
        for (int i = 0; i < n; ++i) v[i] -= h * u[i];
      }
    double nv = norm2(v);
    for (double& t : v) t /= nv;
    Q.push_back(v);
  }
  DenseMatrix C(n, m);
  double sv[m] = {1.0, 1e-2, 1e-4, 1e-6};
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) C(i, j) = Q[j][i] * sv[j];
  EstimateResult e = cond2_rect(C, 17);
  CHECK(e.value == doctest::Approx(1e6).epsilon(0.02));
}

TEST_CASE("abs_inverse and absolute product norms") {
  DenseMatrix I = DenseMatrix::identity(5);
  DenseMatrix X = abs_inverse(I, Tri::lower);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(X(i, j) == (i == j ? 1.0 : 0.0));
  // || |U^{-1}| |U| || for U = I is exactly ||I|| = 1
  double nrm = norm2_est(mat_mul(abs_inverse(I, Tri::upper), mat_abs(I)), 3).value;
  CHECK(nrm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("lu_factor + tri_solve round trip at double precision") {
  Rng rng(71);
  for (int n : {10, 30, 50}) {
    DenseMatrix A = random_matrix(n, rng);
    for (int i = 0; i < n; ++i) A(i, i) += 4.0;
    Vector b = random_vector(n, rng);
    LUFactors f = lu_d(A);
    Vector x = lu_solve_d(f, b);
    QVector r = qd_sub_vec(qd_promote(b), qd_matvec(A, x));
    double rel = qd_norm2_d(r) / (norm2_est(A, 5).value * norm2(x));
    CHECK(rel <= 1e3 * 0x1.0p-53);
  }
}

TEST_CASE("kernels are bit-reproducible") {
  Rng rng(81);
  DenseMatrix A = random_matrix(16, rng);
  Vector x = random_vector(16, rng);
  StatusFlags f1, f2;
  Vector y1 = matvec(FpContext(half_format(), f1), A, x);
  Vector y2 = matvec(FpContext(half_format(), f2), A, x);
  CHECK(y1 == y2);
  EstimateResult e1 = norm2_est(A, 5);
  EstimateResult e2 = norm2_est(A, 5);
  CHECK(e1.value == e2.value);
}
