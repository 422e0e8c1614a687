#pragma once

// Split-preconditioned FGMRES in four precisions: matrix-vector products
// with A in u_A, left-preconditioner solves in u_L, right-preconditioner
// solves in u_R, everything else in the working precision u. No restarting;
// preconditioners are static.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "densela.hpp"
#include "oracle.hpp"
#include "precision.hpp"

namespace fgl {

enum class PrecondMode { none, left, right, split };
const char* to_string(PrecondMode m);

class Preconditioner {
 public:
  enum class SideKind { identity, lower_unit, upper, full };

  static Preconditioner identity(int n);
  // split: M_L is the (permuted) unit-lower factor, M_R the upper factor;
  // left/right: the full LU product on one side, identity on the other.
  static Preconditioner from_lu(PrecondMode mode, LUFactors f);
  static Preconditioner custom(SideKind left, SideKind right, LUFactors f);

  PrecondMode mode() const { return mode_; }
  int n() const { return n_; }
  bool left_is_identity() const { return left_ == SideKind::identity; }
  bool right_is_identity() const { return right_ == SideKind::identity; }
  SideKind left_kind() const { return left_; }
  SideKind right_kind() const { return right_; }
  const LUFactors* factors() const { return factors_ ? &*factors_ : nullptr; }

  // Round factor copies onto a format's grid ahead of time (no-op for
  // identity sides and the double format).
  void prepare(const PrecisionFormat& left_fmt, const PrecisionFormat& right_fmt) const;

  // working-precision applications; identity sides return the input unchanged
  Vector apply_left_inv(const FpContext& ctx, const Vector& v) const;
  Vector apply_right_inv(const FpContext& ctx, const Vector& v) const;

  // pair-precision oracle applications on the unrounded factors
  QVector apply_left_inv_quad(const QVector& v) const;
  QVector apply_right_inv_quad(const QVector& v) const;

  // double-precision applications for estimators and diagnostics
  Vector apply_left_inv_d(const Vector& v) const;
  Vector apply_right_inv_d(const Vector& v) const;
  Vector apply_left_inv_T_d(const Vector& v) const;
  Vector apply_right_inv_T_d(const Vector& v) const;
  Vector mul_left_d(const Vector& v) const;    // M_L v
  Vector mul_right_d(const Vector& v) const;   // M_R v
  Vector mul_left_T_d(const Vector& v) const;
  Vector mul_right_T_d(const Vector& v) const;

 private:
  Preconditioner() = default;
  struct FormatCache {
    DenseMatrix L, U;
  };
  struct Cache {
    std::mutex mx;
    std::map<const PrecisionFormat*, FormatCache> entries;
  };
  const FormatCache& cached(const PrecisionFormat& fmt) const;

  PrecondMode mode_ = PrecondMode::none;
  SideKind left_ = SideKind::identity;
  SideKind right_ = SideKind::identity;
  int n_ = 0;
  std::optional<LUFactors> factors_;
  std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

// Incremental Givens least-squares state for min || beta e1 - H_k y ||.
class LeastSquaresState {
 public:
  LeastSquaresState(FpContext ctx, double beta);

  // h_col holds h_{1,k}..h_{k+1,k}; returns the residual estimate alpha_k.
  // A sine reaching |s| >= 1 - u throws AssumptionViolatedError, unless
  // sine_violated is non-null, in which case it is set and the rotation is
  // applied anyway (the solver records the failed hypothesis and finishes
  // the run, the way the stagnating experiments in the tables do).
  double update(const Vector& h_col, bool* sine_violated = nullptr);
  Vector solve_y() const;  // back substitution in the working precision
  int size() const { return static_cast<int>(cos_.size()); }
  double alpha() const { return alpha_; }
  double max_abs_sine() const { return max_abs_sine_; }

 private:
  FpContext ctx_;
  std::vector<double> cos_, sin_, g_;
  std::vector<Vector> rcols_;
  double alpha_ = 0.0;
  double max_abs_sine_ = 0.0;
};

struct SolveTrace {
  std::vector<Vector> Z;      // z_j after the u_R application
  std::vector<Vector> S;      // s_j = A z_j in u_A
  std::vector<Vector> W;      // w_j = M_L^{-1} s_j in u_L
  std::vector<Vector> V;      // v_1 .. v_{k+1}
  std::vector<Vector> Hcols;  // column j: h_{1..j+1, j}
  Vector x0;
};

struct SolveReport {
  Vector x;
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  bool sine_assumption_violated = false;  // some |s_k| reached 1 - u
  double beta = 0.0;
  double tol = 0.0;
  std::vector<double> alpha_history;
  std::vector<double> ynorm_history;
  double max_abs_sine = 0.0;
  double norm_Zk = 0.0;     // 2-norm estimate of [z_1 .. z_k]
  double norm_MR_dx = 0.0;  // ||M_R (x - x0)||
  Vector residual_working;  // r = b - A x in the annotated precisions
  double residual_norm_working = 0.0;
  double true_residual_norm = 0.0;  // ||b - A x|| in pair precision
  StatusFlags status;
  SolveTrace trace;
};

struct SolveOptions {
  double tol = -1.0;  // <= 0 means 4u
  int maxit = 200;
  Vector x0;          // empty means zeros
};

SolveReport solve(const DenseMatrix& A, const Vector& b, const Preconditioner& M,
                  const PrecisionConfig& cfg, const SolveOptions& opts = {});

// c0(n) = 18.53 n^{3/2}
double c0_growth(int n);

struct AssumptionChecks {
  double nu_value = 0.0;  // 2.12 (n+1) u
  bool nu_ok = true;
  double kappa_C = 0.0;
  double c0_u_kappa_C = 0.0;  // c0(n) u kappa(C^(k))
  bool kappa_C_ok = true;
  double max_abs_sine = 0.0;
  bool sines_ok = true;
  double rho = 0.0;
  bool rho_ok = true;
};

// Evaluates the rounding-analysis hypotheses on a finished run;
// rho is supplied by the diagnostics layer.
AssumptionChecks check_assumptions(const SolveReport& rep, const DenseMatrix& A,
                                   const Vector& b, const Preconditioner& M,
                                   const PrecisionConfig& cfg, double rho);

}  // namespace fgl
