#include <doctest.h>

#include <cmath>
#include <limits>

#include "precision.hpp"
#include "quadd.hpp"
#include "rng.hpp"
#include "support/binary16_ref.hpp"

using namespace fgl;

namespace {

double random_double_wide(Rng& rng) {
  // spread over many binades, including values far outside the half range
  int e = static_cast<int>(rng.uniform01() * 80.0) - 40;
  return (2.0 * rng.uniform01() - 1.0) * std::ldexp(1.0, e);
}

}  // namespace

TEST_CASE("registry unit roundoffs match the IEEE table bit-exactly") {
  CHECK(half_format().unit_roundoff() == 0x1.0p-11);
  CHECK(single_format().unit_roundoff() == 0x1.0p-24);
  CHECK(double_format().unit_roundoff() == 0x1.0p-53);
  CHECK(mp4_format().unit_roundoff() == 0x1.0p-14);
  CHECK(quad_format().unit_roundoff() <= 0x1.0p-104);
  CHECK(find_format("half") == &half_format());
  CHECK(find_format("mp4") == &mp4_format());
  CHECK(find_format("single") == &single_format());
  CHECK(find_format("double") == &double_format());
  CHECK(find_format("quad") == &quad_format());
  CHECK(find_format("fp97") == nullptr);
  CHECK(format_registry().size() == 5);
}

TEST_CASE("half format constants") {
  CHECK(half_format().max_finite() == 65504.0);
  CHECK(half_format().min_normal() == 0x1.0p-14);
  CHECK(half_format().min_subnormal() == 0x1.0p-24);
}

TEST_CASE("round_to(half) basics") {
  CHECK(round_to(half_format(), 1.0) == 1.0);
  CHECK(round_to(half_format(), 1.0 + 0x1.0p-12) == 1.0);  // tie to even
  StatusFlags fl;
  double r = round_to(half_format(), 65520.0, &fl);
  CHECK(std::isinf(r));
  CHECK(r > 0);
  CHECK(fl.overflow);
  // just below the overflow threshold
  CHECK(round_to(half_format(), 65519.999) == 65504.0);
  // gradual underflow
  CHECK(round_to(half_format(), 0x1.0p-24) == 0x1.0p-24);
  CHECK(round_to(half_format(), 0x1.0p-26) == 0.0);
  StatusFlags uf;
  round_to(half_format(), 1e-9, &uf);
  CHECK(uf.underflow);
  // specials propagate
  double inf = std::numeric_limits<double>::infinity();
  CHECK(round_to(half_format(), inf) == inf);
  CHECK(round_to(half_format(), -inf) == -inf);
  CHECK(std::isnan(round_to(half_format(), std::nan(""))));
  CHECK(std::signbit(round_to(half_format(), -0.0)));
  CHECK(std::signbit(round_to(half_format(), -1e-30)));
}

TEST_CASE("round_to(half) round-trips every finite binary16 value") {
  for (uint32_t bits = 0; bits < 0x10000; ++bits) {
    uint16_t h = static_cast<uint16_t>(bits);
    if (((h >> 10) & 0x1F) == 31) continue;  // inf/nan patterns
    double v = b16ref::half_bits_to_double(h);
    CHECK(round_to(half_format(), v) == v);
  }
}

TEST_CASE("round_to(half) agrees with the reference on all grid midpoints") {
  // midpoints between consecutive nonnegative half values, signed both ways
  double prev = 0.0;
  int checked = 0;
  for (uint32_t bits = 1; bits < 0x7C01; ++bits) {
    double v = b16ref::half_bits_to_double(static_cast<uint16_t>(bits));
    if (std::isinf(v)) break;
    double mid = (prev + v) / 2.0;
    CHECK(round_to(half_format(), mid) == b16ref::round_to_half(mid));
    CHECK(round_to(half_format(), -mid) == b16ref::round_to_half(-mid));
    prev = v;
    ++checked;
  }
  CHECK(checked > 30000);
  // the midpoint beyond the largest finite value
  CHECK(std::isinf(b16ref::round_to_half(65520.0)));
  CHECK(round_to(half_format(), 65520.0) == b16ref::round_to_half(65520.0));
}

TEST_CASE("round_to(half) agrees with the reference on random doubles") {
  Rng rng(99);
  for (int i = 0; i < 1000000; ++i) {
    double v = random_double_wide(rng);
    double ours = round_to(half_format(), v);
    double ref = b16ref::round_to_half(v);
    if (ours != ref) {
      CAPTURE(v);
      CHECK(ours == ref);
    }
  }
}

TEST_CASE("round_to(single) agrees with the hardware float cast") {
  Rng rng(1234);
  for (int i = 0; i < 1000000; ++i) {
    int e = static_cast<int>(rng.uniform01() * 300.0) - 150;
    double v = (2.0 * rng.uniform01() - 1.0) * std::ldexp(1.0, e);
    double ours = round_to(single_format(), v);
    double ref = static_cast<double>(static_cast<float>(v));
    if (ours != ref) {
      CAPTURE(v);
      CHECK(ours == ref);
    }
  }
}

TEST_CASE("round_to(double) is the identity on binary64") {
  Rng rng(5);
  for (int i = 0; i < 100000; ++i) {
    double v = random_double_wide(rng);
    CHECK(round_to(double_format(), v) == v);
  }
}

TEST_CASE("round_to properties: idempotent, odd, monotone") {
  Rng rng(42);
  const PrecisionFormat* fmts[] = {&half_format(), &mp4_format(), &single_format()};
  for (const PrecisionFormat* f : fmts) {
    for (int i = 0; i < 20000; ++i) {
      double v = random_double_wide(rng);
      double r = round_to(*f, v);
      CHECK(round_to(*f, r) == r);
      CHECK(round_to(*f, -v) == -r);
      double w = random_double_wide(rng);
      double rw = round_to(*f, w);
      if (v <= w) {
        CHECK(r <= rw);
      } else {
        CHECK(r >= rw);
      }
    }
  }
}

TEST_CASE("mp4 format: 4-decimal-digit precision with the wide exponent range") {
  // u = 2^-14 means the spacing just above 1 is 2^-13; 1 + 2^-14 is a tie
  CHECK(round_to(mp4_format(), 1.0 + 0x1.0p-14) == 1.0);
  CHECK(round_to(mp4_format(), 1.0 + 0x1.0p-13) == 1.0 + 0x1.0p-13);
  CHECK(round_to(mp4_format(), 1.0 + 0x1.0p-15) == 1.0);
  // values that kill half survive mp4 (no overflow until 2^1024)
  CHECK(round_to(mp4_format(), 1e20) == doctest::Approx(1e20).epsilon(1e-4));
  CHECK(!std::isinf(round_to(mp4_format(), 1e300)));
  CHECK(round_to(mp4_format(), 1e-300) != 0.0);
}

TEST_CASE("fl_op worked examples") {
  StatusFlags fl;
  CHECK(fl_op(double_format(), FlOp::add, 1.0, 0x1.0p-53, &fl) == 1.0);
  // the half product 0.1h * 10: the exact product 0.999755859375 is a tie
  // and rounds to even, i.e. exactly 1.0 (reference-rounder verified)
  double a = round_to(half_format(), 0.1);
  CHECK(a == 0.0999755859375);
  double prod = fl_op(half_format(), FlOp::mul, a, 10.0, &fl);
  CHECK(prod == b16ref::round_to_half(a * 10.0));
  CHECK(prod == 1.0);
  CHECK(std::fabs(prod - a * 10.0) <= 0x1.0p-11 * std::fabs(a * 10.0));
  // adding zero is the identity for on-grid values
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    double x = round_to(single_format(), random_double_wide(rng));
    CHECK(fl_op(single_format(), FlOp::add, x, 0.0) == x);
  }
}

TEST_CASE("fl_op error model: one rounding of the exact result") {
  Rng rng(77);
  const PrecisionFormat* fmts[] = {&half_format(), &mp4_format(),
                                   &single_format(), &double_format()};
  for (const PrecisionFormat* f : fmts) {
    double u = f->unit_roundoff();
    for (int i = 0; i < 20000; ++i) {
      double a = round_to(*f, (2.0 * rng.uniform01() - 1.0) * std::ldexp(1.0, static_cast<int>(rng.uniform01() * 10.0) - 5));
      double b = round_to(*f, (2.0 * rng.uniform01() - 1.0) * std::ldexp(1.0, static_cast<int>(rng.uniform01() * 10.0) - 5));
      if (a == 0.0 || b == 0.0) continue;
      FlOp ops[] = {FlOp::add, FlOp::sub, FlOp::mul, FlOp::div};
      for (FlOp op : ops) {
        double r = fl_op(*f, op, a, b);
        if (!std::isfinite(r)) continue;
        qd exact;
        switch (op) {
          case FlOp::add: exact = qd_add(qd(a), qd(b)); break;
          case FlOp::sub: exact = qd_sub(qd(a), qd(b)); break;
          case FlOp::mul: exact = qd_mul(qd(a), qd(b)); break;
          default: exact = qd_div(qd(a), qd(b)); break;
        }
        double ex = exact.value();
        if (ex == 0.0) {
          CHECK(r == 0.0);
        } else if (std::fabs(ex) >= f->min_normal()) {
          CHECK(std::fabs(r - ex) <= u * std::fabs(ex) * (1.0 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("fl_op IEEE special cases and flags") {
  StatusFlags fl;
  double r = fl_op(half_format(), FlOp::div, 1.0, 0.0, &fl);
  CHECK(std::isinf(r));
  CHECK(!fl.overflow);  // division by zero is not an overflow
  StatusFlags fl2;
  double r2 = fl_op(half_format(), FlOp::mul, 60000.0, 2.0, &fl2);
  CHECK(std::isinf(r2));
  CHECK(fl2.overflow);
  StatusFlags fl3;
  double r3 = fl_op(single_format(), FlOp::div, 0.0, 0.0, &fl3);
  CHECK(std::isnan(r3));
  CHECK(fl3.nan_produced);
  StatusFlags fl4;
  double r4 = fl_op(single_format(), FlOp::sqrt, -1.0, 0.0, &fl4);
  CHECK(std::isnan(r4));
  CHECK(fl4.nan_produced);
}

TEST_CASE("quad scalar ops via the pair type") {
  qd r = quad_add(qd(1.0), qd(0x1.0p-60));
  CHECK(r.hi == 1.0);
  CHECK(r.lo == 0x1.0p-60);
  // fl_op with the quad format rounds the pair result onto binary64
  CHECK(fl_op(quad_format(), FlOp::add, 1.0, 0x1.0p-60) == 1.0);
  CHECK(fl_op(quad_format(), FlOp::mul, 3.0, 1.0 / 3.0) == 3.0 * (1.0 / 3.0));
}
