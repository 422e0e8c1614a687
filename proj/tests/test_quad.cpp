#include <doctest.h>

#include <cmath>

#include "quadd.hpp"
#include "rng.hpp"

using namespace fgl;

namespace {

__float128 to_f128(qd a) {
  return static_cast<__float128>(a.hi) + static_cast<__float128>(a.lo);
}

__float128 f128_abs(__float128 x) { return x < 0 ? -x : x; }

// relative error of a dd result against a 113-bit oracle value
double rel_err(qd got, __float128 exact) {
  if (exact == 0) return got.hi == 0.0 && got.lo == 0.0 ? 0.0 : 1.0;
  __float128 diff = f128_abs(to_f128(got) - exact);
  return static_cast<double>(diff / f128_abs(exact));
}

qd random_qd(Rng& rng) {
  int e = static_cast<int>(rng.uniform01() * 40.0) - 20;
  double hi = (2.0 * rng.uniform01() - 1.0) * std::ldexp(1.0, e);
  double lo = hi * (2.0 * rng.uniform01() - 1.0) * 0x1.0p-53;
  return qdet::two_sum(hi, lo);
}

constexpr double kTol = 0x1.0p-104;

}  // namespace

TEST_CASE("pair arithmetic matches a 113-bit oracle to 2^-104") {
  Rng rng(20240517);
  double worst_add = 0, worst_mul = 0, worst_div = 0, worst_sqrt = 0;
  for (int i = 0; i < 200000; ++i) {
    qd a = random_qd(rng), b = random_qd(rng);
    __float128 fa = to_f128(a), fb = to_f128(b);
    worst_add = std::max(worst_add, rel_err(qd_add(a, b), fa + fb));
    worst_mul = std::max(worst_mul, rel_err(qd_mul(a, b), fa * fb));
    if (b.hi != 0.0) worst_div = std::max(worst_div, rel_err(qd_div(a, b), fa / fb));
    if (a.hi > 0.0) {
      // oracle sqrt via one Newton step from the dd result in f128
      qd s = qd_sqrt(a);
      __float128 fs = to_f128(s);
      __float128 resid = fa - fs * fs;  // ~ 2 sqrt(a) * error
      double re = static_cast<double>(f128_abs(resid) / fa) / 2.0;
      worst_sqrt = std::max(worst_sqrt, re);
    }
  }
  CHECK(worst_add <= kTol);
  CHECK(worst_mul <= kTol);
  CHECK(worst_div <= kTol);
  CHECK(worst_sqrt <= kTol);
}

TEST_CASE("pair addition is exact when the sum is representable") {
  qd r = qd_add(qd(1.0), qd(0x1.0p-60));
  CHECK(r.hi == 1.0);
  CHECK(r.lo == 0x1.0p-60);
}

TEST_CASE("3 * (1/3) is 1 within 2^-104") {
  qd third = qd_div(qd(1.0), qd(3.0));
  qd r = qd_mul(qd(3.0), third);
  CHECK(rel_err(r, static_cast<__float128>(1)) <= kTol);
}

TEST_CASE("adding zero is the identity") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    qd x = random_qd(rng);
    qd r = qd_add(x, qd(0.0));
    CHECK(r.hi == x.hi);
    CHECK(r.lo == x.lo);
  }
}

TEST_CASE("cancellation keeps full relative accuracy") {
  // (1 + 2^-80) - 1 must come out exactly 2^-80
  qd a = qd_add(qd(1.0), qd(0x1.0p-80));
  qd r = qd_sub(a, qd(1.0));
  CHECK(r.hi == 0x1.0p-80);
  CHECK(r.lo == 0.0);
}
