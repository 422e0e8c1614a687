#include <doctest.h>

#include <cmath>
#include <sstream>

#include "densela.hpp"
#include "errors.hpp"
#include "problems.hpp"
#include "rng.hpp"

using namespace fgl;

namespace {

double kappa_of(const DenseMatrix& A, uint64_t seed) {
  const int n = A.rows();
  LUFactors f = lu_d(A);
  CondResult c = cond2_est(
      [&](const double* in, double* out) {
        Vector r = matvec_d(A, std::span<const double>(in, n));
        std::copy(r.begin(), r.end(), out);
      },
      [&](const double* in, double* out) {
        Vector r = matvec_T_d(A, std::span<const double>(in, n));
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
      n, seed);
  return c.kappa;
}

DenseMatrix transpose(const DenseMatrix& A) {
  DenseMatrix B(A.cols(), A.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) B(j, i) = A(i, j);
  return B;
}

}  // namespace

TEST_CASE("synthetic: condition number is 10^c") {
  Problem p0 = synthetic_problem(60, 0.0, 1);
  CHECK(kappa_of(p0.A, 1) == doctest::Approx(1.0).epsilon(0.01));

  Problem p3 = synthetic_problem(200, 3.0, 1);
  CHECK(kappa_of(p3.A, 1) == doctest::Approx(1e3).epsilon(0.01));
}

TEST_CASE("synthetic: deterministic and stream-isolated") {
  Problem a1 = synthetic_problem(40, 2.0, 7);
  Problem other = synthetic_problem(43, 5.0, 8);  // unrelated stream
  Problem a2 = synthetic_problem(40, 2.0, 7);
  CHECK(a1.A.data() == a2.A.data());
  CHECK(a1.b == a2.b);
  Problem a3 = synthetic_problem(40, 2.0, 8);
  CHECK(a1.A.data() != a3.A.data());
  (void)other;
}

TEST_CASE("synthetic: b entries are uniform on (0,1)") {
  Problem p = synthetic_problem(100, 1.0, 3);
  for (double v : p.b) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("synthetic: D is recoverable as U^T A V^T") {
  SyntheticFactors f;
  Problem p = synthetic_problem(50, 4.0, 2, &f);
  DenseMatrix R = mat_mul(transpose(f.U), mat_mul(p.A, transpose(f.V)));
  double na = norm2_est(p.A, 1).value;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      double want = i == j ? f.d[i] : 0.0;
      CHECK(std::fabs(R(i, j) - want) <= 50 * 0x1.0p-53 * na * 10);
    }
}

TEST_CASE("matrix market: coordinate format") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n"
      "% a comment\n"
      "2 2 2\n"
      "1 1 1.0\n"
      "2 2 2.0\n");
  Problem p = read_matrix_market(in, "diag", 1);
  CHECK(p.n == 2);
  CHECK(p.A(0, 0) == 1.0);
  CHECK(p.A(1, 1) == 2.0);
  CHECK(p.A(0, 1) == 0.0);
  CHECK(p.A(1, 0) == 0.0);
  CHECK(p.b.size() == 2);
}

TEST_CASE("matrix market: symmetric mirroring") {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "3 3 4\n"
      "1 1 2.0\n"
      "2 1 -1.0\n"
      "3 2 5.0\n"
      "3 3 1.5\n");
  Problem p = read_matrix_market(in, "sym", 1);
  CHECK(p.A(0, 1) == -1.0);
  CHECK(p.A(1, 0) == -1.0);
  CHECK(p.A(1, 2) == 5.0);
  CHECK(p.A(2, 1) == 5.0);
}

TEST_CASE("matrix market: array format is column-major") {
  std::istringstream in(
      "%%MatrixMarket matrix array real general\n"
      "2 2\n"
      "1\n2\n3\n4\n");
  Problem p = read_matrix_market(in, "arr", 1);
  CHECK(p.A(0, 0) == 1.0);
  CHECK(p.A(1, 0) == 2.0);
  CHECK(p.A(0, 1) == 3.0);
  CHECK(p.A(1, 1) == 4.0);
}

TEST_CASE("matrix market: errors carry line numbers and field checks") {
  std::istringstream bad1("not a matrix market file\n");
  CHECK_THROWS_AS(read_matrix_market(bad1, "x", 1), ParseError);

  std::istringstream bad2(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 3 1\n"
      "1 1 1.0\n");
  CHECK_THROWS_AS(read_matrix_market(bad2, "x", 1), ParseError);

  std::istringstream bad3(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 1\n"
      "1 oops 1.0\n");
  try {
    read_matrix_market(bad3, "x", 1);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  std::istringstream cplx(
      "%%MatrixMarket matrix coordinate complex general\n"
      "1 1 1\n"
      "1 1 1.0 0.0\n");
  CHECK_THROWS_AS(read_matrix_market(cplx, "x", 1), UnsupportedFieldError);

  std::istringstream pat(
      "%%MatrixMarket matrix coordinate pattern general\n"
      "1 1 1\n"
      "1 1\n");
  CHECK_THROWS_AS(read_matrix_market(pat, "x", 1), UnsupportedFieldError);

  std::istringstream skew(
      "%%MatrixMarket matrix coordinate real skew-symmetric\n"
      "1 1 0\n");
  CHECK_THROWS_AS(read_matrix_market(skew, "x", 1), UnsupportedFieldError);

  std::istringstream oob(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 1\n"
      "3 1 1.0\n");
  CHECK_THROWS_AS(read_matrix_market(oob, "x", 1), ParseError);
}

TEST_CASE("matrix market: write-read round trip is bit exact") {
  Problem p = synthetic_problem(20, 2.0, 9);
  std::ostringstream out;
  write_matrix_market(p.A, out);
  std::istringstream in(out.str());
  Problem q = read_matrix_market(in, "rt", 9);
  CHECK(p.A.data() == q.A.data());
}

TEST_CASE("reference_solution: exact cases") {
  {
    Problem p = make_problem("eye", DenseMatrix::identity(4), {1, 2, 3, 4});
    Vector x = reference_solution(p);
    CHECK(x == p.b);
  }
  {
    DenseMatrix A(1, 1);
    A(0, 0) = 2.0;
    Problem p = make_problem("d2", std::move(A), {4.0});
    Vector x = reference_solution(p);
    CHECK(x[0] == 2.0);
  }
}

TEST_CASE("reference_solution: backward error at the pair-precision floor") {
  Problem p = synthetic_problem(60, 5.0, 1);
  QVector x = reference_solution_quad(p);
  QVector r = qd_sub_vec(qd_promote(p.b), qd_matvec(p.A, x));
  double na = norm2_est(p.A, 1).value;
  double be = qd_norm2_d(r) / (na * qd_norm2_d(x) + norm2(p.b));
  CHECK(be <= 1e-28);
}
