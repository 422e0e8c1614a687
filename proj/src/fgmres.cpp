#include "fgmres.hpp"

#include <cmath>
#include <stdexcept>

namespace fgl {

const char* to_string(PrecondMode m) {
  switch (m) {
    case PrecondMode::none: return "none";
    case PrecondMode::left: return "left";
    case PrecondMode::right: return "right";
    default: return "split";
  }
}

Preconditioner Preconditioner::identity(int n) {
  Preconditioner p;
  p.mode_ = PrecondMode::none;
  p.n_ = n;
  return p;
}

Preconditioner Preconditioner::from_lu(PrecondMode mode, LUFactors f) {
  Preconditioner p;
  p.mode_ = mode;
  p.n_ = f.L.rows();
  switch (mode) {
    case PrecondMode::none:
      return identity(p.n_);
    case PrecondMode::split:
      p.left_ = SideKind::lower_unit;
      p.right_ = SideKind::upper;
      break;
    case PrecondMode::left:
      p.left_ = SideKind::full;
      p.right_ = SideKind::identity;
      break;
    case PrecondMode::right:
      p.left_ = SideKind::identity;
      p.right_ = SideKind::full;
      break;
  }
  p.factors_ = std::move(f);
  return p;
}

Preconditioner Preconditioner::custom(SideKind left, SideKind right, LUFactors f) {
  Preconditioner p;
  p.n_ = f.L.rows();
  p.left_ = left;
  p.right_ = right;
  p.factors_ = std::move(f);
  if (left == SideKind::identity && right == SideKind::identity)
    p.mode_ = PrecondMode::none;
  else if (right == SideKind::identity)
    p.mode_ = PrecondMode::left;
  else if (left == SideKind::identity)
    p.mode_ = PrecondMode::right;
  else
    p.mode_ = PrecondMode::split;
  return p;
}

const Preconditioner::FormatCache& Preconditioner::cached(
    const PrecisionFormat& fmt) const {
  std::lock_guard<std::mutex> lock(cache_->mx);
  auto it = cache_->entries.find(&fmt);
  if (it != cache_->entries.end()) return it->second;
  StatusFlags dummy;
  FpContext ctx(fmt, dummy);
  FormatCache fc;
  fc.L = round_matrix(ctx, factors_->L);
  fc.U = round_matrix(ctx, factors_->U);
  return cache_->entries.emplace(&fmt, std::move(fc)).first->second;
}

void Preconditioner::prepare(const PrecisionFormat& left_fmt,
                             const PrecisionFormat& right_fmt) const {
  if (!factors_) return;
  if (left_ != SideKind::identity &&
      left_fmt.kind() == PrecisionFormat::Kind::simulated)
    cached(left_fmt);
  if (right_ != SideKind::identity &&
      right_fmt.kind() == PrecisionFormat::Kind::simulated)
    cached(right_fmt);
}

namespace {

Vector permute(const std::vector<int>& perm, const Vector& v) {
  Vector w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = v[perm[i]];
  return w;
}

Vector unpermute(const std::vector<int>& perm, const Vector& v) {
  Vector w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[perm[i]] = v[i];
  return w;
}

QVector permute_q(const std::vector<int>& perm, const QVector& v) {
  QVector w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = v[perm[i]];
  return w;
}

}  // namespace

Vector Preconditioner::apply_left_inv(const FpContext& ctx, const Vector& v) const {
  if (left_ == SideKind::identity) return v;
  const bool sim = ctx.format().kind() == PrecisionFormat::Kind::simulated;
  const FormatCache* fc = sim ? &cached(ctx.format()) : nullptr;
  const DenseMatrix& L = sim ? fc->L : factors_->L;
  const DenseMatrix& U = sim ? fc->U : factors_->U;
  Vector w = permute(factors_->perm, v);
  if (left_ == SideKind::lower_unit) return tri_solve(ctx, L, w, Tri::lower);
  // full: U^{-1} L^{-1} P v
  Vector y = tri_solve(ctx, L, w, Tri::lower);
  return tri_solve(ctx, U, y, Tri::upper);
}

Vector Preconditioner::apply_right_inv(const FpContext& ctx, const Vector& v) const {
  if (right_ == SideKind::identity) return v;
  const bool sim = ctx.format().kind() == PrecisionFormat::Kind::simulated;
  const FormatCache* fc = sim ? &cached(ctx.format()) : nullptr;
  const DenseMatrix& L = sim ? fc->L : factors_->L;
  const DenseMatrix& U = sim ? fc->U : factors_->U;
  if (right_ == SideKind::upper) return tri_solve(ctx, U, v, Tri::upper);
  Vector w = permute(factors_->perm, v);
  Vector y = tri_solve(ctx, L, w, Tri::lower);
  return tri_solve(ctx, U, y, Tri::upper);
}

QVector Preconditioner::apply_left_inv_quad(const QVector& v) const {
  if (left_ == SideKind::identity) return v;
  QVector w = permute_q(factors_->perm, v);
  QVector y = qd_tri_solve(factors_->L, w, Tri::lower);
  if (left_ == SideKind::lower_unit) return y;
  return qd_tri_solve(factors_->U, y, Tri::upper);
}

QVector Preconditioner::apply_right_inv_quad(const QVector& v) const {
  if (right_ == SideKind::identity) return v;
  if (right_ == SideKind::upper) return qd_tri_solve(factors_->U, v, Tri::upper);
  QVector w = permute_q(factors_->perm, v);
  QVector y = qd_tri_solve(factors_->L, w, Tri::lower);
  return qd_tri_solve(factors_->U, y, Tri::upper);
}

Vector Preconditioner::apply_left_inv_d(const Vector& v) const {
  if (left_ == SideKind::identity) return v;
  Vector w = permute(factors_->perm, v);
  Vector y = tri_solve_d(factors_->L, w, Tri::lower);
  if (left_ == SideKind::lower_unit) return y;
  return tri_solve_d(factors_->U, y, Tri::upper);
}

Vector Preconditioner::apply_right_inv_d(const Vector& v) const {
  if (right_ == SideKind::identity) return v;
  if (right_ == SideKind::upper) return tri_solve_d(factors_->U, v, Tri::upper);
  Vector w = permute(factors_->perm, v);
  Vector y = tri_solve_d(factors_->L, w, Tri::lower);
  return tri_solve_d(factors_->U, y, Tri::upper);
}

Vector Preconditioner::apply_left_inv_T_d(const Vector& v) const {
  if (left_ == SideKind::identity) return v;
  if (left_ == SideKind::lower_unit) {
    Vector t = tri_solve_T_d(factors_->L, v, Tri::lower);
    return unpermute(factors_->perm, t);
  }
  Vector t = tri_solve_T_d(factors_->U, v, Tri::upper);
  Vector s = tri_solve_T_d(factors_->L, t, Tri::lower);
  return unpermute(factors_->perm, s);
}

Vector Preconditioner::apply_right_inv_T_d(const Vector& v) const {
  if (right_ == SideKind::identity) return v;
  if (right_ == SideKind::upper) return tri_solve_T_d(factors_->U, v, Tri::upper);
  Vector t = tri_solve_T_d(factors_->U, v, Tri::upper);
  Vector s = tri_solve_T_d(factors_->L, t, Tri::lower);
  return unpermute(factors_->perm, s);
}

Vector Preconditioner::mul_left_d(const Vector& v) const {
  if (left_ == SideKind::identity) return v;
  if (left_ == SideKind::lower_unit)
    return unpermute(factors_->perm, matvec_d(factors_->L, v));
  Vector y = matvec_d(factors_->U, v);
  return unpermute(factors_->perm, matvec_d(factors_->L, y));
}

Vector Preconditioner::mul_right_d(const Vector& v) const {
  if (right_ == SideKind::identity) return v;
  if (right_ == SideKind::upper) return matvec_d(factors_->U, v);
  Vector y = matvec_d(factors_->U, v);
  return unpermute(factors_->perm, matvec_d(factors_->L, y));
}

Vector Preconditioner::mul_left_T_d(const Vector& v) const {
  if (left_ == SideKind::identity) return v;
  Vector t = permute(factors_->perm, v);
  Vector s = matvec_T_d(factors_->L, t);
  if (left_ == SideKind::lower_unit) return s;
  return matvec_T_d(factors_->U, s);
}

Vector Preconditioner::mul_right_T_d(const Vector& v) const {
  if (right_ == SideKind::identity) return v;
  if (right_ == SideKind::upper) return matvec_T_d(factors_->U, v);
  Vector t = permute(factors_->perm, v);
  Vector s = matvec_T_d(factors_->L, t);
  return matvec_T_d(factors_->U, s);
}

LeastSquaresState::LeastSquaresState(FpContext ctx, double beta) : ctx_(ctx) {
  g_.push_back(beta);
  alpha_ = std::fabs(beta);
}

double LeastSquaresState::update(const Vector& h_col, bool* sine_violated) {
  const int k = static_cast<int>(cos_.size()) + 1;
  if (static_cast<int>(h_col.size()) != k + 1)
    throw std::invalid_argument("ls_update: column has wrong length");
  Vector col = h_col;
  for (int i = 0; i < k - 1; ++i) {
    double t1 = ctx_.add(ctx_.mul(cos_[i], col[i]), ctx_.mul(sin_[i], col[i + 1]));
    double t2 = ctx_.sub(ctx_.mul(cos_[i], col[i + 1]), ctx_.mul(sin_[i], col[i]));
    col[i] = t1;
    col[i + 1] = t2;
  }
  GivensRotation g = givens(ctx_, col[k - 1], col[k]);
  if (std::fabs(g.s) > max_abs_sine_) max_abs_sine_ = std::fabs(g.s);
  if (g.sine_near_one) {
    if (sine_violated)
      *sine_violated = true;
    else
      throw AssumptionViolatedError("Givens sine reached |s| >= 1 - u at column " +
                                    std::to_string(k));
  }
  cos_.push_back(g.c);
  sin_.push_back(g.s);
  col[k - 1] = g.r;
  rcols_.emplace_back(col.begin(), col.begin() + k);

  double gold = g_[k - 1];
  g_[k - 1] = ctx_.mul(g.c, gold);
  g_.push_back(-ctx_.mul(g.s, gold));
  alpha_ = std::fabs(g_[k]);
  return alpha_;
}

Vector LeastSquaresState::solve_y() const {
  const int k = size();
  Vector y(k);
  for (int i = k - 1; i >= 0; --i) {
    double acc = g_[i];
    for (int j = i + 1; j < k; ++j)
      acc = ctx_.sub(acc, ctx_.mul(rcols_[j][i], y[j]));
    y[i] = ctx_.div(acc, rcols_[i][i]);
  }
  return y;
}

SolveReport solve(const DenseMatrix& A, const Vector& b, const Preconditioner& M,
                  const PrecisionConfig& cfg, const SolveOptions& opts) {
  const int n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("solve: A must be square");
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve: b size mismatch");
  if (M.n() != n) throw std::invalid_argument("solve: preconditioner size mismatch");
  if (!opts.x0.empty() && static_cast<int>(opts.x0.size()) != n)
    throw std::invalid_argument("solve: x0 size mismatch");

  SolveReport rep;
  FpContext cu(*cfg.u, rep.status);
  FpContext cA(*cfg.uA, rep.status);
  FpContext cL(*cfg.uL, rep.status);
  FpContext cR(*cfg.uR, rep.status);
  M.prepare(*cfg.uL, *cfg.uR);

  const DenseMatrix* Ause = &A;
  DenseMatrix Around;
  if (cfg.uA->kind() == PrecisionFormat::Kind::simulated) {
    Around = round_matrix(cA, A);
    Ause = &Around;
  }

  Vector x0 = opts.x0.empty() ? Vector(n, 0.0) : opts.x0;
  rep.trace.x0 = x0;

  Vector t = matvec(cA, *Ause, x0);
  Vector tp = M.apply_left_inv(cL, t);
  Vector bp = M.apply_left_inv(cL, b);
  Vector r0(n);
  for (int i = 0; i < n; ++i) r0[i] = cu.sub(bp[i], tp[i]);
  const double beta = norm2_ctx(cu, r0);
  rep.beta = beta;
  const double tol = opts.tol > 0.0 ? opts.tol : 4.0 * cfg.u->unit_roundoff();
  rep.tol = tol;

  auto finalize = [&](Vector x) {
    Vector tf = matvec(cA, *Ause, x);
    Vector r(n);
    for (int i = 0; i < n; ++i) r[i] = cu.sub(b[i], tf[i]);
    rep.residual_norm_working = norm2_ctx(cu, r);
    rep.residual_working = std::move(r);
    // oracle quantities, strictly after the convergence decision
    rep.true_residual_norm =
        qd_norm2_d(qd_sub_vec(qd_promote(b), qd_matvec(A, x)));
    Vector dx(n);
    for (int i = 0; i < n; ++i) dx[i] = x[i] - rep.trace.x0[i];
    rep.norm_MR_dx = norm2(M.mul_right_d(dx));
    const int k = static_cast<int>(rep.trace.Z.size());
    if (k == 0) {
      rep.norm_Zk = 0.0;
    } else {
      const auto& Z = rep.trace.Z;
      rep.norm_Zk = norm2_est(
                        [&](const double* in, double* out) {
                          for (int i = 0; i < n; ++i) {
                            double acc = 0.0;
                            for (int j = 0; j < k; ++j) acc += Z[j][i] * in[j];
                            out[i] = acc;
                          }
                        },
                        [&](const double* in, double* out) {
                          for (int j = 0; j < k; ++j) {
                            double acc = 0.0;
                            for (int i = 0; i < n; ++i) acc += Z[j][i] * in[i];
                            out[j] = acc;
                          }
                        },
                        k, n, 0x5a6b)
                        .value;
    }
    rep.x = std::move(x);
  };

  if (beta == 0.0) {
    rep.converged = true;
    rep.iterations = 0;
    finalize(std::move(x0));
    return rep;
  }

  Vector v1(n);
  for (int i = 0; i < n; ++i) v1[i] = cu.div(r0[i], beta);
  std::vector<Vector>& V = rep.trace.V;
  V.push_back(std::move(v1));

  LeastSquaresState ls(cu, beta);
  bool convergence = false;
  int k = 0;
  while (!convergence && k < opts.maxit) {
    ++k;
    Vector z = M.apply_right_inv(cR, V[k - 1]);
    Vector s = matvec(cA, *Ause, z);
    Vector w = M.apply_left_inv(cL, s);
    rep.trace.Z.push_back(std::move(z));
    rep.trace.S.push_back(std::move(s));

    MgsResult mg = mgs_orthogonalize(cu, w, V);
    rep.trace.W.push_back(std::move(w));
    double hk1 = norm2_ctx(cu, mg.w);
    Vector hcol = std::move(mg.h);
    hcol.push_back(hk1);
    rep.trace.Hcols.push_back(hcol);

    double alpha = ls.update(hcol, &rep.sine_assumption_violated);
    rep.alpha_history.push_back(alpha);
    rep.ynorm_history.push_back(norm2(ls.solve_y()));

    if (alpha <= tol * beta) {
      convergence = true;
    } else if (hk1 == 0.0) {
      rep.breakdown = true;  // exact breakdown without meeting the tolerance
      break;
    } else {
      Vector vnext(n);
      for (int i = 0; i < n; ++i) vnext[i] = cu.div(mg.w[i], hk1);
      V.push_back(std::move(vnext));
    }
  }

  rep.iterations = k;
  rep.converged = convergence;
  rep.max_abs_sine = ls.max_abs_sine();

  Vector x(n);
  if (k == 0) {
    x = x0;
  } else {
    Vector y = ls.solve_y();
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j)
        acc = cu.add(acc, cu.mul(rep.trace.Z[j][i], y[j]));
      x[i] = cu.add(x0[i], acc);
    }
  }
  finalize(std::move(x));
  return rep;
}

double c0_growth(int n) { return 18.53 * std::pow(static_cast<double>(n), 1.5); }

AssumptionChecks check_assumptions(const SolveReport& rep, const DenseMatrix& A,
                                   const Vector& b, const Preconditioner& M,
                                   const PrecisionConfig& cfg, double rho) {
  const int n = A.rows();
  const double u = cfg.u->unit_roundoff();
  AssumptionChecks ch;
  ch.nu_value = 2.12 * (n + 1) * u;
  ch.nu_ok = ch.nu_value < 0.01;
  ch.max_abs_sine = rep.max_abs_sine;
  ch.sines_ok = rep.max_abs_sine < 1.0 - u;
  ch.rho = rho;
  ch.rho_ok = rho < 1.0;

  const int k = static_cast<int>(rep.trace.Z.size());
  DenseMatrix C(n, k + 1);
  Vector col0 = M.apply_left_inv_d(b);
  bool x0_zero = true;
  for (double v : rep.trace.x0)
    if (v != 0.0) x0_zero = false;
  if (!x0_zero) {
    Vector at0 = M.apply_left_inv_d(matvec_d(A, rep.trace.x0));
    for (int i = 0; i < n; ++i) col0[i] -= at0[i];
  }
  for (int i = 0; i < n; ++i) C(i, 0) = col0[i];
  for (int j = 0; j < k; ++j) {
    Vector cj = M.apply_left_inv_d(matvec_d(A, rep.trace.Z[j]));
    for (int i = 0; i < n; ++i) C(i, j + 1) = cj[i];
  }
  EstimateResult est = cond2_rect(C, 0xCC01);
  ch.kappa_C = est.value;
  ch.c0_u_kappa_C = c0_growth(n) * u * est.value;
  ch.kappa_C_ok = ch.c0_u_kappa_C < 0.1;
  return ch;
}

}  // namespace fgl
