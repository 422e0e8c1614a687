#pragma once

// Measures the error-analysis quantities of a finished run: Rigal-Gaches
// backward errors (original and left-preconditioned system), forward error
// against a pair-precision reference, psi_A / psi_L, rho, zeta terms, the
// computable bound evaluations, and the LU-specific psi bounds. Also hosts
// the precision recommender.

#include <string>

#include "fgmres.hpp"
#include "problems.hpp"

namespace fgl {

struct AnalysisConstants {
  double c_nk = 1.0;    // c(n,k) in the residual/backward-error bounds
  double c13_nk = 1.0;  // c13(n,k) in rho
  static double c0(int n) { return c0_growth(n); }
};

// Quantities that depend only on (A, preconditioner); cached across runs.
struct PrecondAnalysis {
  double norm_A = 0.0;
  double norm_Atilde = 0.0;   // ||M_L^{-1} A||
  double norm_ML = 1.0, norm_MR = 1.0;
  double norm_MLinv = 1.0, norm_MRinv = 1.0;
  double kappa_A = 1.0;
  double kappa_Atilde = 1.0;  // kappa(M_L^{-1} A)
  double kappa_Ahat = 1.0;    // kappa(M_L^{-1} A M_R^{-1})
  double kappa_ML = 1.0, kappa_MR = 1.0;
  double norm_ELML = 0.0;     // ||E_L M_L||
  double norm_ER = 0.0;       // ||E_R||
  double er_over_mrinv = 0.0; // approximation of ||E_R|| / ||M_R^{-1}||
  double psiA_bound = 0.0;
  double psiL_bound = 0.0;
  bool estimates_converged = true;
};

PrecondAnalysis analyze_preconditioner(const DenseMatrix& A, const Preconditioner& M);

// ||b - A x|| in pair precision over (||A|| ||x|| + ||b||).
double backward_error(const DenseMatrix& A, const Vector& b, const Vector& x,
                      double norm_A);

// ||x - x_ref|| / ||x_ref|| in pair precision.
double forward_error(const Vector& x, const QVector& x_ref);

struct PsiMeasurement {
  double psi_A = 0.0;  // max_j ||M_L^{-1}(s_j - A z_j)|| / (u_A ||Atilde|| ||z_j||)
  double psi_L = 0.0;  // max_j ||w_j - M_L^{-1} s_j|| / (u_L ||Atilde|| ||z_j||)
};
PsiMeasurement measure_psi(const DenseMatrix& A, const Preconditioner& M,
                           const SolveReport& rep, const PrecisionConfig& cfg,
                           double norm_Atilde);

// rho = 1.3 c13(n,k) ||M_R|| (u ||Z_k|| + u_R ||E_R||)
double rho_value(double norm_MR, double norm_Zk, double norm_ER,
                 const PrecisionConfig& cfg, const AnalysisConstants& consts = {});

struct ZetaTerms {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double zeta = 0.0;
};
ZetaTerms zeta_terms(const PrecisionConfig& cfg, const PsiMeasurement& psi,
                     double norm_ELML, double norm_btilde, double norm_Atilde,
                     double norm_Zk, double norm_MR_dx, double norm_x0,
                     double norm_xk);

struct BoundEvaluations {
  double residual_bound = 0.0;     // rhs bounding ||btilde - Atilde x_k||
  double be_leftprec_bound = 0.0;  // rhs bounding the preconditioned BE
  double be_orig_bound = 0.0;      // original-system rhs with min(kappa_ML, kappa_Atilde)
  double fe_bound_left = 0.0;      // zeta * kappa(Atilde) form
  double fe_bound_split = 0.0;     // zeta * kappa(Ahat) * kappa(M_R) form
  bool residual_ok = true, be_leftprec_ok = true, be_orig_ok = true;
  bool fe_left_ok = true, fe_split_ok = true;
};
BoundEvaluations bound_suite(double rho, const ZetaTerms& z,
                             const PrecondAnalysis& an, double true_resid_precond,
                             double be_leftprec, double be_orig, double fe,
                             const AnalysisConstants& consts = {});

struct DiagnosticsReport {
  double be_orig = 0.0;
  double be_leftprec = 0.0;
  double fe = 0.0;
  double psi_A = 0.0, psi_L = 0.0;
  double rho = 0.0;
  double zeta1 = 0.0, zeta2 = 0.0, zeta = 0.0;
  double norm_Zk = 0.0, norm_MR_dx = 0.0;
  double norm_btilde = 0.0;
  double true_residual_precond = 0.0;  // ||btilde - Atilde x_k|| in pair precision
  PrecondAnalysis analysis;
  BoundEvaluations bounds;
  AssumptionChecks checks;
};

DiagnosticsReport run_diagnostics(const DenseMatrix& A, const Vector& b,
                                  const Preconditioner& M, const SolveReport& rep,
                                  const PrecisionConfig& cfg,
                                  const PrecondAnalysis& an, const QVector& x_ref,
                                  const AnalysisConstants& consts = {});

struct Recommendation {
  const PrecisionFormat* uA = nullptr;
  const PrecisionFormat* uL = nullptr;
  const PrecisionFormat* uR = nullptr;
  bool feasible_A = true, feasible_L = true, feasible_R = true;
  std::string rationale;
};

// Picks the loosest registry formats for u_A, u_L, u_R from pilot-measured
// quantities, targeting a backward error of order target_u.
Recommendation recommend_precisions(double psi_A, double psi_L, double norm_ELML,
                                    double norm_ER, double norm_MRinv,
                                    const PrecisionFormat& target_u);

}  // namespace fgl
