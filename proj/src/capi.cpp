#include "fgmreslab.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "fgmres.hpp"
#include "problems.hpp"
#include "rng.hpp"

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& msg) { t_last_error = msg; }

struct ProblemData {
  fgl::Problem p;
  std::mutex mx;
  std::optional<fgl::QVector> x_ref;

  const fgl::QVector& reference() {
    std::lock_guard<std::mutex> lock(mx);
    if (!x_ref) x_ref = fgl::reference_solution_quad(p);
    return *x_ref;
  }
};

struct PrecondData {
  std::shared_ptr<ProblemData> prob;
  fgl::Preconditioner M = fgl::Preconditioner::identity(0);
  std::mutex mx;
  std::optional<fgl::PrecondAnalysis> an;

  const fgl::PrecondAnalysis& analysis() {
    std::lock_guard<std::mutex> lock(mx);
    if (!an) an = fgl::analyze_preconditioner(prob->p.A, M);
    return *an;
  }
};

struct ResultData {
  std::shared_ptr<ProblemData> prob;
  std::shared_ptr<PrecondData> prec;
  fgl::PrecisionConfig cfg;
  fgl::SolveReport rep;
  std::mutex mx;
  std::optional<fgl::DiagnosticsReport> diag;

  const fgl::DiagnosticsReport& diagnostics() {
    std::lock_guard<std::mutex> lock(mx);
    if (!diag)
      diag = fgl::run_diagnostics(prob->p.A, prob->p.b, prec->M, rep, cfg,
                                  prec->analysis(), prob->reference());
    return *diag;
  }
};

template <typename F>
fgl_status guarded(F&& f) {
  try {
    return f();
  } catch (const fgl::SingularInFormatError& e) {
    set_error(e.what());
    return FGL_ERR_SINGULAR_IN_FORMAT;
  } catch (const fgl::AssumptionViolatedError& e) {
    set_error(e.what());
    return FGL_ERR_ASSUMPTION_VIOLATED;
  } catch (const fgl::ParseError& e) {
    set_error(e.what());
    return FGL_ERR_PARSE;
  } catch (const fgl::UnsupportedFieldError& e) {
    set_error(e.what());
    return FGL_ERR_UNSUPPORTED_FIELD;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return FGL_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return FGL_ERR_INTERNAL;
  }
}

const fgl::PrecisionFormat* format_or_throw(const char* name, const char* what) {
  if (!name) return &fgl::double_format();
  const fgl::PrecisionFormat* f = fgl::find_format(name);
  if (!f)
    throw std::invalid_argument(std::string(what) + ": unknown format '" +
                                name + "'");
  return f;
}

}  // namespace

struct fgl_problem {
  std::shared_ptr<ProblemData> d;
};
struct fgl_precond {
  std::shared_ptr<PrecondData> d;
};
struct fgl_result {
  std::shared_ptr<ResultData> d;
};
struct fgl_recommendation {
  std::string uA, uL, uR;
  int feasible_A = 1, feasible_L = 1, feasible_R = 1;
  std::string rationale;
};

extern "C" {

const char* fgl_version(void) { return "0.1.0"; }

const char* fgl_status_name(fgl_status s) {
  switch (s) {
    case FGL_OK: return "ok";
    case FGL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FGL_ERR_MAX_ITERATIONS: return "max_iterations";
    case FGL_ERR_SINGULAR_IN_FORMAT: return "singular_in_format";
    case FGL_ERR_PARSE: return "parse_error";
    case FGL_ERR_UNSUPPORTED_FIELD: return "unsupported_field";
    case FGL_ERR_ASSUMPTION_VIOLATED: return "assumption_violated";
    case FGL_ERR_NO_FORMAT_SATISFIES: return "no_format_satisfies";
    default: return "internal_error";
  }
}

const char* fgl_last_error(void) { return t_last_error.c_str(); }

const char* fgl_rng_version(void) { return fgl::Rng::kVersion; }

int fgl_format_count(void) {
  return static_cast<int>(fgl::format_registry().size());
}

fgl_status fgl_format_name(int index, char* buf, size_t cap) {
  return guarded([&]() -> fgl_status {
    const auto& reg = fgl::format_registry();
    if (index < 0 || index >= static_cast<int>(reg.size()) || !buf)
      throw std::invalid_argument("fgl_format_name: bad index or buffer");
    const std::string& name = reg[index]->name();
    if (cap <= name.size())
      throw std::invalid_argument("fgl_format_name: buffer too small");
    std::memcpy(buf, name.c_str(), name.size() + 1);
    return FGL_OK;
  });
}

fgl_status fgl_format_query(const char* name, int* significand_bits, int* emin,
                            int* emax, double* unit_roundoff) {
  return guarded([&]() -> fgl_status {
    const fgl::PrecisionFormat* f = format_or_throw(name, "fgl_format_query");
    if (significand_bits) *significand_bits = f->significand_bits();
    if (emin) *emin = f->emin();
    if (emax) *emax = f->emax();
    if (unit_roundoff) *unit_roundoff = f->unit_roundoff();
    return FGL_OK;
  });
}

fgl_status fgl_format_round(const char* name, double v, double* out) {
  return guarded([&]() -> fgl_status {
    const fgl::PrecisionFormat* f = format_or_throw(name, "fgl_format_round");
    if (!out) throw std::invalid_argument("fgl_format_round: null output");
    *out = fgl::round_to(*f, v);
    return FGL_OK;
  });
}

fgl_status fgl_problem_synthetic(int n, double c, uint64_t seed, fgl_problem** out) {
  return guarded([&]() -> fgl_status {
    if (!out) throw std::invalid_argument("fgl_problem_synthetic: null output");
    if (n < 2) throw std::invalid_argument("fgl_problem_synthetic: n must be >= 2");
    if (!(c >= 0.0)) throw std::invalid_argument("fgl_problem_synthetic: c must be >= 0");
    auto d = std::make_shared<ProblemData>();
    d->p = fgl::synthetic_problem(n, c, seed);
    *out = new fgl_problem{std::move(d)};
    return FGL_OK;
  });
}

fgl_status fgl_problem_load(const char* path, uint64_t seed, fgl_problem** out) {
  return guarded([&]() -> fgl_status {
    if (!out || !path) throw std::invalid_argument("fgl_problem_load: null argument");
    auto d = std::make_shared<ProblemData>();
    d->p = fgl::load_matrix_market(path, seed);
    *out = new fgl_problem{std::move(d)};
    return FGL_OK;
  });
}

fgl_status fgl_problem_dense(const char* label, int n, const double* a_rowmajor,
                             const double* b, fgl_problem** out) {
  return guarded([&]() -> fgl_status {
    if (!out || !a_rowmajor || !b)
      throw std::invalid_argument("fgl_problem_dense: null argument");
    if (n < 1) throw std::invalid_argument("fgl_problem_dense: n must be >= 1");
    fgl::DenseMatrix A(n, n);
    for (size_t i = 0; i < static_cast<size_t>(n) * n; ++i) {
      if (!std::isfinite(a_rowmajor[i]))
        throw std::invalid_argument("fgl_problem_dense: non-finite matrix entry");
      A.data()[i] = a_rowmajor[i];
    }
    fgl::Vector bv(b, b + n);
    for (double v : bv)
      if (!std::isfinite(v))
        throw std::invalid_argument("fgl_problem_dense: non-finite rhs entry");
    auto d = std::make_shared<ProblemData>();
    d->p = fgl::make_problem(label ? label : "custom", std::move(A), std::move(bv));
    *out = new fgl_problem{std::move(d)};
    return FGL_OK;
  });
}

void fgl_problem_free(fgl_problem* p) { delete p; }

int fgl_problem_n(const fgl_problem* p) { return p ? p->d->p.n : 0; }

const char* fgl_problem_label(const fgl_problem* p) {
  return p ? p->d->p.label.c_str() : "";
}

fgl_status fgl_problem_write_matrix(const fgl_problem* p, const char* path) {
  return guarded([&]() -> fgl_status {
    if (!p || !path) throw std::invalid_argument("fgl_problem_write_matrix: null argument");
    fgl::write_matrix_market(p->d->p.A, std::string(path));
    return FGL_OK;
  });
}

fgl_status fgl_precond_create(const fgl_problem* p, const char* mode,
                              const char* factor_format, fgl_precond** out) {
  return guarded([&]() -> fgl_status {
    if (!p || !out || !mode)
      throw std::invalid_argument("fgl_precond_create: null argument");
    std::string m = mode;
    auto d = std::make_shared<PrecondData>();
    d->prob = p->d;
    if (m == "none") {
      d->M = fgl::Preconditioner::identity(p->d->p.n);
    } else {
      fgl::PrecondMode pm;
      if (m == "left") pm = fgl::PrecondMode::left;
      else if (m == "right") pm = fgl::PrecondMode::right;
      else if (m == "split") pm = fgl::PrecondMode::split;
      else throw std::invalid_argument("fgl_precond_create: unknown mode '" + m + "'");
      const fgl::PrecisionFormat* ff =
          format_or_throw(factor_format, "fgl_precond_create");
      fgl::StatusFlags flags;
      fgl::FpContext ctx(*ff, flags);
      d->M = fgl::Preconditioner::from_lu(pm, fgl::lu_factor(ctx, p->d->p.A));
    }
    *out = new fgl_precond{std::move(d)};
    return FGL_OK;
  });
}

void fgl_precond_free(fgl_precond* m) { delete m; }

const char* fgl_precond_mode(const fgl_precond* m) {
  return m ? fgl::to_string(m->d->M.mode()) : "";
}

fgl_status fgl_solve(const fgl_problem* p, const fgl_precond* m,
                     const fgl_solve_options* opts, fgl_result** out) {
  return guarded([&]() -> fgl_status {
    if (!p || !m || !out) throw std::invalid_argument("fgl_solve: null argument");
    if (m->d->prob != p->d)
      throw std::invalid_argument(
          "fgl_solve: preconditioner was built for a different problem");
    fgl::PrecisionConfig cfg;
    fgl::SolveOptions so;
    if (opts) {
      cfg.u = format_or_throw(opts->u, "fgl_solve (u)");
      cfg.uA = format_or_throw(opts->uA, "fgl_solve (uA)");
      cfg.uL = format_or_throw(opts->uL, "fgl_solve (uL)");
      cfg.uR = format_or_throw(opts->uR, "fgl_solve (uR)");
      so.tol = opts->tol;
      if (opts->maxit > 0) so.maxit = opts->maxit;
    }
    auto d = std::make_shared<ResultData>();
    d->prob = p->d;
    d->prec = m->d;
    d->cfg = cfg;
    d->rep = fgl::solve(p->d->p.A, p->d->p.b, m->d->M, cfg, so);
    bool converged = d->rep.converged;
    *out = new fgl_result{std::move(d)};
    if (!converged) {
      set_error("solve did not meet the tolerance within maxit iterations");
      return FGL_ERR_MAX_ITERATIONS;
    }
    return FGL_OK;
  });
}

void fgl_result_free(fgl_result* r) { delete r; }

int fgl_result_iterations(const fgl_result* r) {
  return r ? r->d->rep.iterations : 0;
}

int fgl_result_converged(const fgl_result* r) {
  return r && r->d->rep.converged ? 1 : 0;
}

fgl_status fgl_result_solution(const fgl_result* r, double* buf, size_t cap) {
  return guarded([&]() -> fgl_status {
    if (!r || !buf) throw std::invalid_argument("fgl_result_solution: null argument");
    const fgl::Vector& x = r->d->rep.x;
    if (cap < x.size())
      throw std::invalid_argument("fgl_result_solution: buffer too small");
    std::memcpy(buf, x.data(), x.size() * sizeof(double));
    return FGL_OK;
  });
}

int fgl_result_history_len(const fgl_result* r) {
  return r ? static_cast<int>(r->d->rep.alpha_history.size()) : 0;
}

fgl_status fgl_result_alpha_history(const fgl_result* r, double* buf, size_t cap) {
  return guarded([&]() -> fgl_status {
    if (!r || !buf) throw std::invalid_argument("fgl_result_alpha_history: null argument");
    const auto& h = r->d->rep.alpha_history;
    if (cap < h.size())
      throw std::invalid_argument("fgl_result_alpha_history: buffer too small");
    std::memcpy(buf, h.data(), h.size() * sizeof(double));
    return FGL_OK;
  });
}

fgl_status fgl_result_metrics(const fgl_result* r, fgl_metrics* out) {
  return guarded([&]() -> fgl_status {
    if (!r || !out) throw std::invalid_argument("fgl_result_metrics: null argument");
    const fgl::SolveReport& rep = r->d->rep;
    const fgl::DiagnosticsReport& d = r->d->diagnostics();
    fgl_metrics m{};
    m.iterations = rep.iterations;
    m.converged = rep.converged ? 1 : 0;
    m.breakdown = rep.breakdown ? 1 : 0;
    m.beta = rep.beta;
    m.final_alpha = rep.alpha_history.empty() ? 0.0 : rep.alpha_history.back();
    m.be_orig = d.be_orig;
    m.be_leftprec = d.be_leftprec;
    m.fe = d.fe;
    m.zeta1 = d.zeta1;
    m.zeta2 = d.zeta2;
    m.zeta = d.zeta;
    m.rho = d.rho;
    m.psi_a = d.psi_A;
    m.psi_l = d.psi_L;
    m.norm_zk = d.norm_Zk;
    m.norm_mr_dx = d.norm_MR_dx;
    m.norm_a = d.analysis.norm_A;
    m.norm_atilde = d.analysis.norm_Atilde;
    m.norm_btilde = d.norm_btilde;
    m.kappa_a = d.analysis.kappa_A;
    m.kappa_atilde = d.analysis.kappa_Atilde;
    m.kappa_ahat = d.analysis.kappa_Ahat;
    m.kappa_ml = d.analysis.kappa_ML;
    m.kappa_mr = d.analysis.kappa_MR;
    m.norm_elml = d.analysis.norm_ELML;
    m.norm_er = d.analysis.norm_ER;
    m.er_over_mrinv = d.analysis.er_over_mrinv;
    m.psi_a_bound = d.analysis.psiA_bound;
    m.psi_l_bound = d.analysis.psiL_bound;
    m.bound_residual = d.bounds.residual_bound;
    m.bound_be_leftprec = d.bounds.be_leftprec_bound;
    m.bound_be_orig = d.bounds.be_orig_bound;
    m.bound_fe_left = d.bounds.fe_bound_left;
    m.bound_fe_split = d.bounds.fe_bound_split;
    m.true_residual_norm = rep.true_residual_norm;
    m.true_residual_precond = d.true_residual_precond;
    m.ok_nu = d.checks.nu_ok ? 1 : 0;
    m.nu_value = d.checks.nu_value;
    m.ok_kappa_c = d.checks.kappa_C_ok ? 1 : 0;
    m.kappa_c = d.checks.kappa_C;
    m.ok_sines = d.checks.sines_ok ? 1 : 0;
    m.max_abs_sine = d.checks.max_abs_sine;
    m.ok_rho = d.checks.rho_ok ? 1 : 0;
    m.flag_overflow = rep.status.overflow ? 1 : 0;
    m.flag_underflow = rep.status.underflow ? 1 : 0;
    m.flag_nan = rep.status.nan_produced ? 1 : 0;
    *out = m;
    return FGL_OK;
  });
}

fgl_status fgl_recommend(const fgl_result* pilot, const char* target_u,
                         fgl_recommendation** out) {
  return guarded([&]() -> fgl_status {
    if (!pilot || !out) throw std::invalid_argument("fgl_recommend: null argument");
    const fgl::PrecisionFormat* tu = format_or_throw(target_u, "fgl_recommend");
    const fgl::DiagnosticsReport& d = pilot->d->diagnostics();
    fgl::Recommendation rec = fgl::recommend_precisions(
        d.psi_A, d.psi_L, d.analysis.norm_ELML, d.analysis.norm_ER,
        d.analysis.norm_MRinv, *tu);
    auto* h = new fgl_recommendation;
    h->uA = rec.uA->name();
    h->uL = rec.uL->name();
    h->uR = rec.uR->name();
    h->feasible_A = rec.feasible_A ? 1 : 0;
    h->feasible_L = rec.feasible_L ? 1 : 0;
    h->feasible_R = rec.feasible_R ? 1 : 0;
    h->rationale = rec.rationale;
    *out = h;
    if (!rec.feasible_A || !rec.feasible_L || !rec.feasible_R) {
      set_error("no registry format satisfies at least one criterion");
      return FGL_ERR_NO_FORMAT_SATISFIES;
    }
    return FGL_OK;
  });
}

void fgl_recommendation_free(fgl_recommendation* r) { delete r; }

const char* fgl_recommendation_format(const fgl_recommendation* r, char slot) {
  if (!r) return "";
  switch (slot) {
    case 'A': return r->uA.c_str();
    case 'L': return r->uL.c_str();
    case 'R': return r->uR.c_str();
    default: return "";
  }
}

int fgl_recommendation_feasible(const fgl_recommendation* r, char slot) {
  if (!r) return 0;
  switch (slot) {
    case 'A': return r->feasible_A;
    case 'L': return r->feasible_L;
    case 'R': return r->feasible_R;
    default: return 0;
  }
}

const char* fgl_recommendation_rationale(const fgl_recommendation* r) {
  return r ? r->rationale.c_str() : "";
}

}  // extern "C"
