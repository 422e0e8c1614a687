#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fgl {

namespace {

LinearOp vec_op(int n, std::function<Vector(const Vector&)> f) {
  return [n, f = std::move(f)](const double* in, double* out) {
    Vector x(in, in + n);
    Vector y = f(x);
    std::copy(y.begin(), y.end(), out);
  };
}

// A with its rows permuted: (PA)(i,:) = A(perm[i],:)
DenseMatrix permute_rows(const DenseMatrix& A, const std::vector<int>& perm) {
  DenseMatrix B(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) B(i, j) = A(perm[i], j);
  return B;
}

// X = T^{-1} B by columnwise substitution in double
DenseMatrix tri_solve_matrix(const DenseMatrix& T, const DenseMatrix& B, Tri side) {
  const int n = T.rows(), m = B.cols();
  DenseMatrix X(n, m);
  Vector col(n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) col[i] = B(i, j);
    Vector x = tri_solve_d(T, col, side);
    for (int i = 0; i < n; ++i) X(i, j) = x[i];
  }
  return X;
}

// signed T^{-1} (columns of identity solved)
DenseMatrix tri_inverse(const DenseMatrix& T, Tri side) {
  return tri_solve_matrix(T, DenseMatrix::identity(T.rows()), side);
}

double est_norm(const DenseMatrix& B, uint64_t seed, bool& converged) {
  EstimateResult r = norm2_est(B, seed);
  converged &= r.converged;
  return r.value;
}

}  // namespace

PrecondAnalysis analyze_preconditioner(const DenseMatrix& A, const Preconditioner& M) {
  const int n = A.rows();
  PrecondAnalysis an;
  bool conv = true;

  LUFactors fa = lu_d(A);
  auto applyA = vec_op(n, [&](const Vector& x) { return matvec_d(A, x); });
  auto applyAT = vec_op(n, [&](const Vector& x) { return matvec_T_d(A, x); });
  auto solveA = vec_op(n, [&](const Vector& x) { return lu_solve_d(fa, x); });
  auto solveAT = vec_op(n, [&](const Vector& x) { return lu_solve_T_d(fa, x); });
  CondResult ca = cond2_est(applyA, applyAT, solveA, solveAT, n, 0xA001);
  an.norm_A = ca.norm;
  an.kappa_A = ca.kappa;
  conv &= ca.converged;

  const bool lid = M.left_is_identity();
  const bool rid = M.right_is_identity();

  CondResult cat;
  if (lid) {
    cat = ca;
  } else {
    cat = cond2_est(
        vec_op(n, [&](const Vector& x) { return M.apply_left_inv_d(matvec_d(A, x)); }),
        vec_op(n, [&](const Vector& x) { return matvec_T_d(A, M.apply_left_inv_T_d(x)); }),
        vec_op(n, [&](const Vector& x) { return lu_solve_d(fa, M.mul_left_d(x)); }),
        vec_op(n, [&](const Vector& x) { return M.mul_left_T_d(lu_solve_T_d(fa, x)); }),
        n, 0xA002);
    conv &= cat.converged;
  }
  an.norm_Atilde = cat.norm;
  an.kappa_Atilde = cat.kappa;

  CondResult cah;
  if (rid) {
    cah = cat;
  } else {
    cah = cond2_est(
        vec_op(n, [&](const Vector& x) {
          return M.apply_left_inv_d(matvec_d(A, M.apply_right_inv_d(x)));
        }),
        vec_op(n, [&](const Vector& x) {
          return M.apply_right_inv_T_d(matvec_T_d(A, M.apply_left_inv_T_d(x)));
        }),
        vec_op(n, [&](const Vector& x) {
          return M.mul_right_d(lu_solve_d(fa, M.mul_left_d(x)));
        }),
        vec_op(n, [&](const Vector& x) {
          return M.mul_left_T_d(lu_solve_T_d(fa, M.mul_right_T_d(x)));
        }),
        n, 0xA003);
    conv &= cah.converged;
  }
  an.kappa_Ahat = cah.kappa;

  const LUFactors* f = M.factors();
  using SK = Preconditioner::SideKind;

  auto side_cond = [&](SK kind, uint64_t seed) -> CondResult {
    const DenseMatrix& L = f->L;
    const DenseMatrix& U = f->U;
    if (kind == SK::lower_unit)
      return cond2_est(
          vec_op(n, [&](const Vector& x) { return matvec_d(L, x); }),
          vec_op(n, [&](const Vector& x) { return matvec_T_d(L, x); }),
          vec_op(n, [&](const Vector& x) { return tri_solve_d(L, x, Tri::lower); }),
          vec_op(n, [&](const Vector& x) { return tri_solve_T_d(L, x, Tri::lower); }),
          n, seed);
    if (kind == SK::upper)
      return cond2_est(
          vec_op(n, [&](const Vector& x) { return matvec_d(U, x); }),
          vec_op(n, [&](const Vector& x) { return matvec_T_d(U, x); }),
          vec_op(n, [&](const Vector& x) { return tri_solve_d(U, x, Tri::upper); }),
          vec_op(n, [&](const Vector& x) { return tri_solve_T_d(U, x, Tri::upper); }),
          n, seed);
    // full L U
    return cond2_est(
        vec_op(n, [&](const Vector& x) { return matvec_d(L, matvec_d(U, x)); }),
        vec_op(n, [&](const Vector& x) { return matvec_T_d(U, matvec_T_d(L, x)); }),
        vec_op(n, [&](const Vector& x) {
          return tri_solve_d(U, tri_solve_d(L, x, Tri::lower), Tri::upper);
        }),
        vec_op(n, [&](const Vector& x) {
          return tri_solve_T_d(L, tri_solve_T_d(U, x, Tri::upper), Tri::lower);
        }),
        n, seed);
  };

  if (!lid) {
    CondResult c = side_cond(M.left_kind(), 0xA004);
    an.norm_ML = c.norm;
    an.norm_MLinv = c.norm_inv;
    an.kappa_ML = c.kappa;
    conv &= c.converged;
  }
  if (!rid) {
    CondResult c = side_cond(M.right_kind(), 0xA005);
    an.norm_MR = c.norm;
    an.norm_MRinv = c.norm_inv;
    an.kappa_MR = c.kappa;
    conv &= c.converged;
  }

  if (f) {
    const DenseMatrix& L = f->L;
    const DenseMatrix& U = f->U;
    DenseMatrix absL = mat_abs(L), absU = mat_abs(U);
    DenseMatrix Linv = tri_inverse(L, Tri::lower);
    DenseMatrix absLinv = mat_abs(Linv);
    DenseMatrix absUinv, absW;
    const bool need_full = M.left_kind() == SK::full || M.right_kind() == SK::full;
    if (!rid || need_full) absUinv = mat_abs(tri_inverse(U, Tri::upper));
    if (need_full) {
      // W = U^{-1} L^{-1}
      absW = mat_abs(tri_solve_matrix(U, Linv, Tri::upper));
    }

    // E matrices of the LU instantiation
    if (M.left_kind() == SK::lower_unit) {
      DenseMatrix EL = mat_mul(mat_mul(absLinv, absL), absLinv);
      an.norm_ELML = est_norm(mat_mul(EL, L), 0xE001, conv);
    } else if (M.left_kind() == SK::full) {
      DenseMatrix EL = mat_add(mat_mul(mat_mul(absW, absL), absLinv),
                               mat_mul(mat_mul(absUinv, absU), absW));
      an.norm_ELML = est_norm(mat_mul(EL, mat_mul(L, U)), 0xE001, conv);
    }
    if (M.right_kind() == SK::upper) {
      DenseMatrix ER = mat_mul(mat_mul(absUinv, absU), absUinv);
      an.norm_ER = est_norm(ER, 0xE002, conv);
      double a1 = est_norm(mat_mul(absUinv, absU), 0xE003, conv);
      double a2 = est_norm(mat_mul(absU, absUinv), 0xE004, conv);
      an.er_over_mrinv = std::min(a1, a2);
    } else if (M.right_kind() == SK::full) {
      DenseMatrix ER = mat_add(mat_mul(mat_mul(absW, absL), absLinv),
                               mat_mul(mat_mul(absUinv, absU), absW));
      an.norm_ER = est_norm(ER, 0xE002, conv);
      an.er_over_mrinv = est_norm(mat_mul(absL, absLinv), 0xE003, conv) +
                         est_norm(mat_mul(absUinv, absU), 0xE004, conv);
    }

    // psi bounds for the LU preconditioner
    DenseMatrix PA = permute_rows(A, f->perm);
    DenseMatrix absPA = mat_abs(PA);
    if (M.left_kind() == SK::lower_unit) {
      DenseMatrix Wl = tri_solve_matrix(L, PA, Tri::lower);  // L^{-1} P A
      double numer = est_norm(mat_mul(absLinv, absPA), 0xB001, conv);
      double denom = est_norm(Wl, 0xB002, conv);
      an.psiA_bound = numer / denom;
      an.psiL_bound = an.kappa_ML;
    } else if (M.left_kind() == SK::full) {
      DenseMatrix Wl = tri_solve_matrix(L, PA, Tri::lower);
      DenseMatrix Wlu = tri_solve_matrix(U, Wl, Tri::upper);  // U^{-1} L^{-1} P A
      double numer = est_norm(mat_mul(absW, absPA), 0xB001, conv);
      double denom = est_norm(Wlu, 0xB002, conv);
      an.psiA_bound = numer / denom;
      double condL = est_norm(mat_mul(absLinv, absL), 0xB003, conv);
      double condU = est_norm(mat_mul(absUinv, absU), 0xB004, conv);
      double normUinv = est_norm(absUinv, 0xB005, conv);
      an.psiL_bound =
          (normUinv * est_norm(Wl, 0xB006, conv) / denom) * condL + condU;
    } else {
      an.psiA_bound = std::sqrt(static_cast<double>(n));
      an.psiL_bound = 0.0;
    }
  } else {
    an.psiA_bound = std::sqrt(static_cast<double>(n));
    an.psiL_bound = 0.0;
  }

  an.estimates_converged = conv;
  return an;
}

double backward_error(const DenseMatrix& A, const Vector& b, const Vector& x,
                      double norm_A) {
  QVector r = qd_sub_vec(qd_promote(b), qd_matvec(A, x));
  double denom = norm_A * norm2(x) + norm2(b);
  if (denom == 0.0) return 0.0;
  return qd_norm2_d(r) / denom;
}

double forward_error(const Vector& x, const QVector& x_ref) {
  QVector diff = qd_sub_vec(qd_promote(x), x_ref);
  return qd_norm2_d(diff) / qd_norm2_d(x_ref);
}

PsiMeasurement measure_psi(const DenseMatrix& A, const Preconditioner& M,
                           const SolveReport& rep, const PrecisionConfig& cfg,
                           double norm_Atilde) {
  PsiMeasurement out;
  const double uA = cfg.uA->unit_roundoff();
  const double uL = cfg.uL->unit_roundoff();
  const size_t k = rep.trace.Z.size();
  for (size_t j = 0; j < k; ++j) {
    const Vector& z = rep.trace.Z[j];
    double nz = norm2(z);
    if (nz == 0.0) continue;
    QVector sstar = qd_matvec(A, z);
    QVector sbar = qd_promote(rep.trace.S[j]);
    QVector mdiff = M.apply_left_inv_quad(qd_sub_vec(sbar, sstar));
    double psiA_j = qd_norm2_d(mdiff) / (uA * norm_Atilde * nz);
    out.psi_A = std::max(out.psi_A, psiA_j);
    if (!M.left_is_identity()) {
      QVector wstar = M.apply_left_inv_quad(sbar);
      QVector wdiff = qd_sub_vec(qd_promote(rep.trace.W[j]), wstar);
      double psiL_j = qd_norm2_d(wdiff) / (uL * norm_Atilde * nz);
      out.psi_L = std::max(out.psi_L, psiL_j);
    }
  }
  return out;
}

double rho_value(double norm_MR, double norm_Zk, double norm_ER,
                 const PrecisionConfig& cfg, const AnalysisConstants& consts) {
  return 1.3 * consts.c13_nk * norm_MR *
         (cfg.u->unit_roundoff() * norm_Zk + cfg.uR->unit_roundoff() * norm_ER);
}

ZetaTerms zeta_terms(const PrecisionConfig& cfg, const PsiMeasurement& psi,
                     double norm_ELML, double norm_btilde, double norm_Atilde,
                     double norm_Zk, double norm_MR_dx, double norm_x0,
                     double norm_xk) {
  const double u = cfg.u->unit_roundoff();
  const double uA = cfg.uA->unit_roundoff();
  const double uL = cfg.uL->unit_roundoff();
  ZetaTerms z;
  z.zeta1 = (u + uL * norm_ELML) * norm_btilde;
  z.zeta2 = (u + uA * psi.psi_A + uL * psi.psi_L) * norm_Atilde *
            (norm_Zk * norm_MR_dx + norm_x0);
  z.zeta = (z.zeta1 + z.zeta2) / (norm_btilde + norm_Atilde * norm_xk);
  return z;
}

BoundEvaluations bound_suite(double rho, const ZetaTerms& z,
                             const PrecondAnalysis& an, double true_resid_precond,
                             double be_leftprec, double be_orig, double fe,
                             const AnalysisConstants& consts) {
  BoundEvaluations b;
  const double factor =
      rho < 1.0 ? 1.3 * consts.c_nk / (1.0 - rho)
                : std::numeric_limits<double>::infinity();
  b.residual_bound = factor * (z.zeta1 + z.zeta2);
  b.be_leftprec_bound = factor * z.zeta;
  b.be_orig_bound = factor * z.zeta * std::min(an.kappa_ML, an.kappa_Atilde);
  b.fe_bound_left = factor * z.zeta * an.kappa_Atilde;
  b.fe_bound_split = factor * z.zeta * an.kappa_Ahat * an.kappa_MR;
  b.residual_ok = true_resid_precond <= b.residual_bound;
  b.be_leftprec_ok = be_leftprec <= b.be_leftprec_bound;
  b.be_orig_ok = be_orig <= b.be_orig_bound;
  b.fe_left_ok = fe <= b.fe_bound_left;
  b.fe_split_ok = fe <= b.fe_bound_split;
  return b;
}

DiagnosticsReport run_diagnostics(const DenseMatrix& A, const Vector& b,
                                  const Preconditioner& M, const SolveReport& rep,
                                  const PrecisionConfig& cfg,
                                  const PrecondAnalysis& an, const QVector& x_ref,
                                  const AnalysisConstants& consts) {
  DiagnosticsReport d;
  d.analysis = an;
  d.norm_Zk = rep.norm_Zk;
  d.norm_MR_dx = rep.norm_MR_dx;
  d.be_orig = backward_error(A, b, rep.x, an.norm_A);
  d.fe = forward_error(rep.x, x_ref);

  QVector bt = M.apply_left_inv_quad(qd_promote(b));
  d.norm_btilde = qd_norm2_d(bt);
  QVector at = M.apply_left_inv_quad(qd_matvec(A, rep.x));
  d.true_residual_precond = qd_norm2_d(qd_sub_vec(bt, at));
  const double nx = norm2(rep.x);
  d.be_leftprec =
      d.true_residual_precond / (d.norm_btilde + an.norm_Atilde * nx);

  PsiMeasurement psi = measure_psi(A, M, rep, cfg, an.norm_Atilde);
  d.psi_A = psi.psi_A;
  d.psi_L = psi.psi_L;
  d.rho = rho_value(an.norm_MR, rep.norm_Zk, an.norm_ER, cfg, consts);

  ZetaTerms z = zeta_terms(cfg, psi, an.norm_ELML, d.norm_btilde, an.norm_Atilde,
                           rep.norm_Zk, rep.norm_MR_dx, norm2(rep.trace.x0), nx);
  d.zeta1 = z.zeta1;
  d.zeta2 = z.zeta2;
  d.zeta = z.zeta;

  d.bounds = bound_suite(d.rho, z, an, d.true_residual_precond, d.be_leftprec,
                         d.be_orig, d.fe, consts);
  d.checks = check_assumptions(rep, A, b, M, cfg, d.rho);
  return d;
}

Recommendation recommend_precisions(double psi_A, double psi_L, double norm_ELML,
                                    double norm_ER, double norm_MRinv,
                                    const PrecisionFormat& target_u) {
  const double ut = target_u.unit_roundoff();
  const auto& reg = format_registry();  // loosest first
  Recommendation rec;
  std::ostringstream why;

  auto pick_psi = [&](double psi) -> const PrecisionFormat* {
    for (const PrecisionFormat* f : reg)
      if (f->unit_roundoff() * psi <= 2.0 * ut) return f;
    return nullptr;
  };

  rec.uA = pick_psi(psi_A);
  if (!rec.uA) {
    rec.uA = reg.back();
    rec.feasible_A = false;
    why << "u_A: no format satisfies u_A*psi_A <= 2u (psi_A = " << psi_A
        << "); falling back to " << rec.uA->name() << "\n";
  } else {
    why << "u_A = " << rec.uA->name() << ": u_A*psi_A = "
        << rec.uA->unit_roundoff() * psi_A << " <= 2u = " << 2.0 * ut
        << " (psi_A = " << psi_A << ")\n";
  }

  rec.uL = pick_psi(psi_L);
  if (!rec.uL) {
    rec.uL = reg.back();
    rec.feasible_L = false;
    why << "u_L: no format satisfies u_L*psi_L <= 2u (psi_L = " << psi_L
        << "); falling back to " << rec.uL->name() << "\n";
  } else {
    why << "u_L = " << rec.uL->name() << ": u_L*psi_L = "
        << rec.uL->unit_roundoff() * psi_L << " <= 2u = " << 2.0 * ut
        << " (psi_L = " << psi_L << ")\n";
    double elml_term = rec.uL->unit_roundoff() * norm_ELML;
    if (elml_term > 2.0 * ut)
      why << "  note: u_L*||E_L M_L|| = " << elml_term
          << " exceeds 2u; the bound on this term is typically a large "
             "overestimate and does not drive the choice\n";
  }

  double ratio = norm_MRinv > 0.0 ? norm_ER / norm_MRinv : 0.0;
  rec.uR = nullptr;
  for (const PrecisionFormat* f : reg) {
    if (ratio < 1.0 / f->unit_roundoff()) {
      rec.uR = f;
      break;
    }
    why << "u_R: " << f->name() << " rejected, ||E_R||/||M_R^{-1}|| = " << ratio
        << " >= 1/u_R = " << 1.0 / f->unit_roundoff() << "\n";
  }
  if (!rec.uR) {
    rec.uR = reg.back();
    rec.feasible_R = false;
    why << "u_R: no format satisfies ||E_R||/||M_R^{-1}|| < 1/u_R; falling "
           "back to " << rec.uR->name() << "\n";
  } else {
    why << "u_R = " << rec.uR->name() << ": ||E_R||/||M_R^{-1}|| = " << ratio
        << " < 1/u_R = " << 1.0 / rec.uR->unit_roundoff() << "\n";
  }

  rec.rationale = why.str();
  return rec;
}

}  // namespace fgl
