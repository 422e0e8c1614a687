/*
 * fgmreslab - mixed-precision FGMRES solver laboratory.
 *
 * C interface over the C++ core: opaque handles, integer status codes,
 * plain structs for metrics. All functions returning fgl_status set a
 * thread-local detail message retrievable with fgl_last_error().
 */

#ifndef FGMRESLAB_H
#define FGMRESLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fgl_status {
  FGL_OK = 0,
  FGL_ERR_INVALID_ARGUMENT = 1,
  FGL_ERR_MAX_ITERATIONS = 2,   /* solve finished without converging */
  FGL_ERR_SINGULAR_IN_FORMAT = 3,
  FGL_ERR_PARSE = 4,
  FGL_ERR_UNSUPPORTED_FIELD = 5,
  FGL_ERR_ASSUMPTION_VIOLATED = 6,
  FGL_ERR_NO_FORMAT_SATISFIES = 7,
  FGL_ERR_INTERNAL = 8
} fgl_status;

typedef struct fgl_problem fgl_problem;
typedef struct fgl_precond fgl_precond;
typedef struct fgl_result fgl_result;
typedef struct fgl_recommendation fgl_recommendation;

const char* fgl_version(void);
const char* fgl_status_name(fgl_status s);
/* thread-local message describing the most recent failure */
const char* fgl_last_error(void);
/* PRNG identifier recorded in report metadata */
const char* fgl_rng_version(void);

/* ---- format registry: "half", "mp4", "single", "double", "quad" ---- */

int fgl_format_count(void);
fgl_status fgl_format_name(int index, char* buf, size_t cap);
fgl_status fgl_format_query(const char* name, int* significand_bits, int* emin,
                            int* emax, double* unit_roundoff);
/* round v onto the named format's grid (nearest, ties to even) */
fgl_status fgl_format_round(const char* name, double v, double* out);

/* ---- problems ---- */

fgl_status fgl_problem_synthetic(int n, double c, uint64_t seed, fgl_problem** out);
fgl_status fgl_problem_load(const char* path, uint64_t seed, fgl_problem** out);
/* dense row-major A (n x n) and right-hand side b (length n) */
fgl_status fgl_problem_dense(const char* label, int n, const double* a_rowmajor,
                             const double* b, fgl_problem** out);
void fgl_problem_free(fgl_problem* p);
int fgl_problem_n(const fgl_problem* p);
const char* fgl_problem_label(const fgl_problem* p);
/* write the coefficient matrix in MatrixMarket array format (17 significant
 * digits; read/write round-trips bit-exactly) */
fgl_status fgl_problem_write_matrix(const fgl_problem* p, const char* path);

/* ---- preconditioners ---- */

/* mode: "none", "left", "right", "split"; factor_format: registry name of the
 * LU factorization precision (ignored for mode "none") */
fgl_status fgl_precond_create(const fgl_problem* p, const char* mode,
                              const char* factor_format, fgl_precond** out);
void fgl_precond_free(fgl_precond* m);
const char* fgl_precond_mode(const fgl_precond* m);

/* ---- solving ---- */

typedef struct fgl_solve_options {
  const char* u;   /* working precision; NULL means "double" */
  const char* uA;  /* matrix-product precision */
  const char* uL;  /* left-preconditioner precision */
  const char* uR;  /* right-preconditioner precision */
  double tol;      /* convergence tolerance; <= 0 means 4u */
  int maxit;       /* <= 0 means 200 */
} fgl_solve_options;

/* Returns FGL_OK when converged. FGL_ERR_MAX_ITERATIONS still produces a
 * result (the final iterate, converged = 0). Any other status leaves *out
 * unset. */
fgl_status fgl_solve(const fgl_problem* p, const fgl_precond* m,
                     const fgl_solve_options* opts, fgl_result** out);
void fgl_result_free(fgl_result* r);

int fgl_result_iterations(const fgl_result* r);
int fgl_result_converged(const fgl_result* r);
fgl_status fgl_result_solution(const fgl_result* r, double* buf, size_t cap);
int fgl_result_history_len(const fgl_result* r);
/* residual-estimate history alpha_1..alpha_k */
fgl_status fgl_result_alpha_history(const fgl_result* r, double* buf, size_t cap);

typedef struct fgl_metrics {
  int iterations;
  int converged;
  int breakdown;
  double beta;             /* initial preconditioned residual norm */
  double final_alpha;      /* last residual estimate (0 when k = 0) */
  double be_orig;          /* backward error of the original system */
  double be_leftprec;      /* backward error of the left-preconditioned system */
  double fe;               /* forward error vs quad reference */
  double zeta1, zeta2, zeta;
  double rho;
  double psi_a, psi_l;
  double norm_zk;          /* ||Z_k|| */
  double norm_mr_dx;       /* ||M_R (x_k - x_0)|| */
  double norm_a, norm_atilde, norm_btilde;
  double kappa_a, kappa_atilde, kappa_ahat, kappa_ml, kappa_mr;
  double norm_elml;        /* ||E_L M_L|| */
  double norm_er;          /* ||E_R|| */
  double er_over_mrinv;    /* approximation of ||E_R|| / ||M_R^{-1}|| */
  double psi_a_bound, psi_l_bound;
  double bound_residual, bound_be_leftprec, bound_be_orig;
  double bound_fe_left, bound_fe_split;
  double true_residual_norm;          /* ||b - A x_k|| in quad */
  double true_residual_precond;       /* ||btilde - Atilde x_k|| in quad */
  /* hypothesis checks: 1 pass / 0 fail, plus the evaluated quantities */
  int ok_nu;
  double nu_value;
  int ok_kappa_c;
  double kappa_c;
  int ok_sines;
  double max_abs_sine;
  int ok_rho;
  /* sticky arithmetic events during the solve */
  int flag_overflow, flag_underflow, flag_nan;
} fgl_metrics;

/* Full diagnostics for a finished solve. Computed lazily on first call and
 * cached inside the result handle. */
fgl_status fgl_result_metrics(const fgl_result* r, fgl_metrics* out);

/* ---- precision recommendation ---- */

/* Derives a precision suggestion from a pilot run's measured quantities,
 * targeting backward error of order target_u. */
fgl_status fgl_recommend(const fgl_result* pilot, const char* target_u,
                         fgl_recommendation** out);
void fgl_recommendation_free(fgl_recommendation* r);
/* slot is one of 'A', 'L', 'R' */
const char* fgl_recommendation_format(const fgl_recommendation* r, char slot);
int fgl_recommendation_feasible(const fgl_recommendation* r, char slot);
const char* fgl_recommendation_rationale(const fgl_recommendation* r);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FGMRESLAB_H */
