#include "precision.hpp"

#include <cmath>
#include <limits>

namespace fgl {

PrecisionFormat::PrecisionFormat(std::string name, int significand_bits,
                                 int emin, int emax, Kind kind)
    : name_(std::move(name)), t_(significand_bits), emin_(emin), emax_(emax),
      kind_(kind) {
  // u = 2^(1-t)/2; the pair format is bounded by 2^-104 per operation.
  unit_roundoff_ = kind_ == Kind::pair ? std::ldexp(1.0, -104)
                                       : std::ldexp(1.0, -t_);
  max_finite_ = std::ldexp(2.0 - std::ldexp(1.0, 1 - t_), emax_);
  min_normal_ = std::ldexp(1.0, emin_);
  min_subnormal_ = std::ldexp(1.0, emin_ - t_ + 1);
}

const PrecisionFormat& half_format() {
  static const PrecisionFormat f("half", 11, -14, 15);
  return f;
}

const PrecisionFormat& mp4_format() {
  // ~4 decimal digits: u = 2^-14 (below half's), binary64 exponent range.
  static const PrecisionFormat f("mp4", 14, -1022, 1023);
  return f;
}

const PrecisionFormat& single_format() {
  static const PrecisionFormat f("single", 24, -126, 127);
  return f;
}

const PrecisionFormat& double_format() {
  static const PrecisionFormat f("double", 53, -1022, 1023,
                                 PrecisionFormat::Kind::native_double);
  return f;
}

const PrecisionFormat& quad_format() {
  static const PrecisionFormat f("quad", 105, -1022, 1023,
                                 PrecisionFormat::Kind::pair);
  return f;
}

const std::vector<const PrecisionFormat*>& format_registry() {
  static const std::vector<const PrecisionFormat*> reg = {
      &half_format(), &mp4_format(), &single_format(), &double_format(),
      &quad_format()};
  return reg;
}

const PrecisionFormat* find_format(std::string_view name) {
  for (const PrecisionFormat* f : format_registry())
    if (f->name() == name) return f;
  return nullptr;
}

double round_to(const PrecisionFormat& fmt, double v, StatusFlags* flags) {
  if (fmt.kind() != PrecisionFormat::Kind::simulated) return v;
  if (v == 0.0 || !std::isfinite(v)) return v;

  // Scale so the grid spacing becomes 1, round to integer (the default FE
  // rounding mode is to-nearest-even), scale back. Both scalings are exact.
  int e = std::ilogb(v);
  int q = std::max(e, fmt.emin()) - (fmt.significand_bits() - 1);
  double y = std::ldexp(v, -q);
  double r = std::nearbyint(y);
  double result = std::ldexp(r, q);

  if (std::fabs(result) > fmt.max_finite()) {
    if (flags) flags->overflow = true;
    return std::copysign(std::numeric_limits<double>::infinity(), v);
  }
  if (flags && result != v && std::fabs(v) < fmt.min_normal())
    flags->underflow = true;
  return result;
}

double fl_op(const PrecisionFormat& fmt, FlOp op, double a, double b,
             StatusFlags* flags) {
  double r;
  switch (fmt.kind()) {
    case PrecisionFormat::Kind::native_double: {
      switch (op) {
        case FlOp::add: r = a + b; break;
        case FlOp::sub: r = a - b; break;
        case FlOp::mul: r = a * b; break;
        case FlOp::div: r = a / b; break;
        default: r = std::sqrt(a); break;
      }
      break;
    }
    case PrecisionFormat::Kind::pair: {
      qd x(a), y(b), z;
      switch (op) {
        case FlOp::add: z = qd_add(x, y); break;
        case FlOp::sub: z = qd_sub(x, y); break;
        case FlOp::mul: z = qd_mul(x, y); break;
        case FlOp::div: z = qd_div(x, y); break;
        default: z = qd_sqrt(x); break;
      }
      r = z.value();
      break;
    }
    default: {
      double exact;  // binary64 intermediate; double rounding accepted, t <= 24
      switch (op) {
        case FlOp::add: exact = a + b; break;
        case FlOp::sub: exact = a - b; break;
        case FlOp::mul: exact = a * b; break;
        case FlOp::div: exact = a / b; break;
        default: exact = std::sqrt(a); break;
      }
      r = round_to(fmt, exact, flags);
      break;
    }
  }
  if (flags) {
    if (std::isnan(r) && !std::isnan(a) && !std::isnan(b))
      flags->nan_produced = true;
    if (std::isinf(r) && std::isfinite(a) && std::isfinite(b) &&
        !(op == FlOp::div && b == 0.0))
      flags->overflow = true;
  }
  return r;
}

}  // namespace fgl
