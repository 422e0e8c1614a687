#pragma once

// Double-double ("compensated pair") arithmetic. A value is the unevaluated
// sum hi + lo with hi = fl(hi + lo). Used as the quad format of the registry
// and as the arithmetic behind every high-precision oracle. Relative error
// per operation is at most 2^-104 (checked against __float128 in the tests).

#include <cmath>

namespace fgl {

struct qd {
  double hi = 0.0;
  double lo = 0.0;

  qd() = default;
  qd(double a) : hi(a), lo(0.0) {}
  qd(double a, double b) : hi(a), lo(b) {}

  double value() const { return hi + lo; }
};

namespace qdet {

// Knuth two-sum: s + e == a + b exactly.
inline qd two_sum(double a, double b) {
  double s = a + b;
  double bv = s - a;
  double e = (a - (s - bv)) + (b - bv);
  return {s, e};
}

// Requires |a| >= |b| or a == 0.
inline qd fast_two_sum(double a, double b) {
  double s = a + b;
  double e = b - (s - a);
  return {s, e};
}

// p + e == a * b exactly.
inline qd two_prod(double a, double b) {
  double p = a * b;
  double e = std::fma(a, b, -p);
  return {p, e};
}

}  // namespace qdet

inline qd qd_neg(qd a) { return {-a.hi, -a.lo}; }

inline qd qd_add(qd a, qd b) {
  qd s = qdet::two_sum(a.hi, b.hi);
  qd t = qdet::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = qdet::fast_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return qdet::fast_two_sum(s.hi, s.lo);
}

inline qd qd_sub(qd a, qd b) { return qd_add(a, qd_neg(b)); }

inline qd qd_mul(qd a, qd b) {
  qd p = qdet::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return qdet::fast_two_sum(p.hi, p.lo);
}

// Long division with two correction terms.
inline qd qd_div(qd a, qd b) {
  double q1 = a.hi / b.hi;
  qd r = qd_sub(a, qd_mul(b, qd(q1)));
  double q2 = (r.hi + r.lo) / b.hi;
  r = qd_sub(r, qd_mul(b, qd(q2)));
  double q3 = (r.hi + r.lo) / b.hi;
  qd q = qdet::fast_two_sum(q1, q2);
  return qd_add(q, qd(q3));
}

inline qd qd_abs(qd a) {
  if (a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0)) return qd_neg(a);
  return a;
}

// sqrt(hi) plus one Newton correction; error is O(u^2) relative.
inline qd qd_sqrt(qd a) {
  if (a.hi == 0.0 && a.lo == 0.0) return {0.0, 0.0};
  double y = std::sqrt(a.hi);
  qd y2 = qdet::two_prod(y, y);
  qd diff = qd_sub(a, y2);
  double corr = diff.value() / (2.0 * y);
  return qdet::fast_two_sum(y, corr);
}

inline bool qd_less(qd a, qd b) {
  if (a.hi != b.hi) return a.hi < b.hi;
  return a.lo < b.lo;
}

}  // namespace fgl
