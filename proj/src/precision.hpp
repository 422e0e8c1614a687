#pragma once

// Simulated floating-point formats. Storage is always binary64; a format
// constrains arithmetic by rounding every elementary operation's result onto
// its grid (round to nearest, ties to even, with gradual underflow and IEEE
// overflow to infinity). The quad format is backed by compensated pairs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "quadd.hpp"

namespace fgl {

// Sticky exception record. One accumulator per solver instance, never global.
struct StatusFlags {
  bool overflow = false;
  bool underflow = false;
  bool nan_produced = false;

  bool any() const { return overflow || underflow || nan_produced; }
  void merge(const StatusFlags& o) {
    overflow |= o.overflow;
    underflow |= o.underflow;
    nan_produced |= o.nan_produced;
  }
};

class PrecisionFormat {
 public:
  enum class Kind { simulated, native_double, pair };

  PrecisionFormat(std::string name, int significand_bits, int emin, int emax,
                  Kind kind = Kind::simulated);

  const std::string& name() const { return name_; }
  // t, counting the implicit leading bit.
  int significand_bits() const { return t_; }
  int emin() const { return emin_; }
  int emax() const { return emax_; }
  double unit_roundoff() const { return unit_roundoff_; }
  double max_finite() const { return max_finite_; }
  double min_normal() const { return min_normal_; }
  double min_subnormal() const { return min_subnormal_; }
  Kind kind() const { return kind_; }
  bool is_native_double() const { return kind_ == Kind::native_double; }
  bool is_pair() const { return kind_ == Kind::pair; }

 private:
  std::string name_;
  int t_;
  int emin_;
  int emax_;
  Kind kind_;
  double unit_roundoff_;
  double max_finite_;
  double min_normal_;
  double min_subnormal_;
};

// Built-in registry: half, mp4, single, double, quad (loosest first).
const std::vector<const PrecisionFormat*>& format_registry();
// nullptr if the name is unknown.
const PrecisionFormat* find_format(std::string_view name);
const PrecisionFormat& half_format();
const PrecisionFormat& mp4_format();
const PrecisionFormat& single_format();
const PrecisionFormat& double_format();
const PrecisionFormat& quad_format();

// Nearest value on fmt's grid, ties to even. +-inf/NaN propagate unchanged;
// overflow encodes as +-inf, underflow is gradual through subnormals down to
// signed zero. Idempotent.
double round_to(const PrecisionFormat& fmt, double v, StatusFlags* flags = nullptr);

enum class FlOp { add, sub, mul, div, sqrt };

// round_to(fmt, exact(a op b)). Operands are expected on fmt's grid already
// (round_to them first otherwise). Exact result is formed in binary64 for
// t <= 24 and in compensated pairs for the quad format; native for double.
double fl_op(const PrecisionFormat& fmt, FlOp op, double a, double b,
             StatusFlags* flags = nullptr);

// Scalar quad-format operations on explicit pairs.
inline qd quad_add(qd a, qd b) { return qd_add(a, b); }
inline qd quad_mul(qd a, qd b) { return qd_mul(a, b); }
inline qd quad_div(qd a, qd b) { return qd_div(a, b); }

// Arithmetic context: a format plus the status accumulator it reports to.
class FpContext {
 public:
  FpContext(const PrecisionFormat& fmt, StatusFlags& flags)
      : fmt_(&fmt), flags_(&flags) {}

  const PrecisionFormat& format() const { return *fmt_; }
  StatusFlags& flags() const { return *flags_; }

  double round(double v) const { return round_to(*fmt_, v, flags_); }
  double add(double a, double b) const { return fl_op(*fmt_, FlOp::add, a, b, flags_); }
  double sub(double a, double b) const { return fl_op(*fmt_, FlOp::sub, a, b, flags_); }
  double mul(double a, double b) const { return fl_op(*fmt_, FlOp::mul, a, b, flags_); }
  double div(double a, double b) const { return fl_op(*fmt_, FlOp::div, a, b, flags_); }
  double sqrt(double a) const { return fl_op(*fmt_, FlOp::sqrt, a, 0.0, flags_); }

 private:
  const PrecisionFormat* fmt_;
  StatusFlags* flags_;
};

// The four precisions of the solver: u (working), u_A, u_L, u_R.
struct PrecisionConfig {
  const PrecisionFormat* u = &double_format();
  const PrecisionFormat* uA = &double_format();
  const PrecisionFormat* uL = &double_format();
  const PrecisionFormat* uR = &double_format();
};

}  // namespace fgl
