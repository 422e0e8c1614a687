// Experiment harness: single solves, precision-grid sweeps, and precision
// recommendations, driven by flags or a flat key=value config file. Links
// the C API only.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fgmreslab.h"

namespace {

constexpr const char* kCsvHeader =
    "label,mode,uA,uL,uR,IC,converged,BE_orig,BE_leftprec,FE,zeta1,zeta2,zeta,"
    "rho,psiA,psiL,normZk,normMRdx,kappaA,kappaAtilde,kappaAhat,kappaML,"
    "kappaMR,flags";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

[[noreturn]] void usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(1);
}

struct ProblemSpec {
  bool synthetic = true;
  int n = 200;
  double c = 1.0;
  uint64_t seed = 1;
  std::string path;
};

ProblemSpec parse_problem(const std::string& s) {
  ProblemSpec ps;
  if (s.rfind("synthetic:", 0) == 0) {
    ps.synthetic = true;
    std::string rest = s.substr(10);
    std::stringstream ss(rest);
    std::string item;
    bool have_c = false;
    while (std::getline(ss, item, ',')) {
      size_t eq = item.find('=');
      if (eq == std::string::npos) usage_error("bad problem spec item '" + item + "'");
      std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      try {
        if (key == "c") {
          ps.c = std::stod(val);
          have_c = true;
        } else if (key == "n") {
          ps.n = std::stoi(val);
        } else if (key == "seed") {
          ps.seed = std::stoull(val);
        } else {
          usage_error("unknown problem key '" + key + "'");
        }
      } catch (const std::exception&) {
        usage_error("bad value '" + val + "' for problem key '" + key + "'");
      }
    }
    if (!have_c) usage_error("synthetic problem spec needs c=...");
  } else if (s.rfind("file:", 0) == 0) {
    ps.synthetic = false;
    ps.path = s.substr(5);
    // optional trailing ,seed=N
    size_t pos = ps.path.rfind(",seed=");
    if (pos != std::string::npos) {
      std::string tail = ps.path.substr(pos + 6);
      if (!tail.empty() && tail.find_first_not_of("0123456789") == std::string::npos) {
        ps.seed = std::stoull(tail);
        ps.path = ps.path.substr(0, pos);
      }
    }
    if (ps.path.empty()) usage_error("file problem spec needs a path");
  } else {
    usage_error("problem must be synthetic:... or file:...");
  }
  return ps;
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) usage_error("cannot open config file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

struct Settings {
  std::string problem;
  std::string precond = "none";
  std::string factor_format;  // empty: pick by the default rule
  std::string u = "double", uA = "double", uL = "double", uR = "double";
  std::string tol = "4u";
  int maxit = 200;
  std::string out = "out";
  std::string uL_list = "half,single,double,quad";
  std::string uR_list = "half,single,double,quad";

  std::string canonical(const std::string& command) const {
    std::ostringstream os;
    os << "command=" << command << "\nproblem=" << problem
       << "\nprecond=" << precond << "\nfactor-format=" << factor_format
       << "\nu=" << u << "\nuA=" << uA << "\nuL=" << uL << "\nuR=" << uR
       << "\ntol=" << tol << "\nmaxit=" << maxit << "\nout=" << out;
    if (command == "grid")
      os << "\nuL-list=" << uL_list << "\nuR-list=" << uR_list;
    os << "\n";
    return os.str();
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_format_name(const std::string& name, const char* what) {
  double u;
  if (fgl_format_query(name.c_str(), nullptr, nullptr, nullptr, &u) != FGL_OK)
    usage_error(std::string(what) + ": unknown format '" + name + "' (" +
                fgl_last_error() + ")");
}

double parse_tol(const std::string& tol, const std::string& u_name) {
  if (tol == "4u") {
    double u;
    fgl_format_query(u_name.c_str(), nullptr, nullptr, nullptr, &u);
    return 4.0 * u;
  }
  try {
    double t = std::stod(tol);
    if (t <= 0.0) usage_error("tol must be positive");
    return t;
  } catch (const std::exception&) {
    usage_error("bad tol '" + tol + "'");
  }
}

struct Handles {
  fgl_problem* prob = nullptr;
  fgl_precond* prec = nullptr;
  std::string label;
  std::string effective_factor_format;
  ~Handles() {
    fgl_precond_free(prec);
    fgl_problem_free(prob);
  }
};

// builds the problem and preconditioner; exits with the right code on failure
void build_handles(const Settings& st, Handles& h) {
  ProblemSpec ps = parse_problem(st.problem);
  fgl_status rc;
  if (ps.synthetic) {
    rc = fgl_problem_synthetic(ps.n, ps.c, ps.seed, &h.prob);
  } else {
    rc = fgl_problem_load(ps.path.c_str(), ps.seed, &h.prob);
  }
  if (rc != FGL_OK) {
    std::cerr << "error: building problem failed: " << fgl_last_error() << "\n";
    std::exit(rc == FGL_ERR_PARSE || rc == FGL_ERR_UNSUPPORTED_FIELD ||
                      rc == FGL_ERR_INVALID_ARGUMENT
                  ? 1
                  : static_cast<int>(rc));
  }
  h.label = fgl_problem_label(h.prob);

  std::string ff = st.factor_format;
  if (ff.empty()) {
    // default rule: mp4 for synthetic c < 6, single otherwise
    ff = (ps.synthetic && ps.c < 6.0) ? "mp4" : "single";
  }
  h.effective_factor_format = ff;
  if (st.precond != "none") check_format_name(ff, "factor-format");

  rc = fgl_precond_create(h.prob, st.precond.c_str(),
                          st.precond == "none" ? nullptr : ff.c_str(), &h.prec);
  if (rc == FGL_ERR_SINGULAR_IN_FORMAT) {
    std::cerr << "error: preconditioner singular in " << ff << " ("
              << fgl_last_error() << ")\n";
    std::exit(3);
  }
  if (rc != FGL_OK) {
    std::cerr << "error: building preconditioner failed: " << fgl_last_error()
              << "\n";
    std::exit(1);
  }
}

std::string flags_field(const fgl_metrics& m) {
  std::ostringstream os;
  os << "nu=" << m.ok_nu << ";kappaC=" << m.ok_kappa_c << ";sk=" << m.ok_sines
     << ";rho=" << m.ok_rho << ";breakdown=" << m.breakdown;
  return os.str();
}

std::string csv_row(const std::string& label, const std::string& mode,
                    const Settings& st, const std::string& uL,
                    const std::string& uR, const fgl_metrics& m) {
  std::ostringstream os;
  os << label << "," << mode << "," << st.uA << "," << uL << "," << uR << ","
     << m.iterations << "," << m.converged << "," << fmt(m.be_orig) << ","
     << fmt(m.be_leftprec) << "," << fmt(m.fe) << "," << fmt(m.zeta1) << ","
     << fmt(m.zeta2) << "," << fmt(m.zeta) << "," << fmt(m.rho) << ","
     << fmt(m.psi_a) << "," << fmt(m.psi_l) << "," << fmt(m.norm_zk) << ","
     << fmt(m.norm_mr_dx) << "," << fmt(m.kappa_a) << "," << fmt(m.kappa_atilde)
     << "," << fmt(m.kappa_ahat) << "," << fmt(m.kappa_ml) << ","
     << fmt(m.kappa_mr) << "," << flags_field(m);
  return os.str();
}

void write_metadata(std::ostream& os, const std::string& command,
                    const Settings& st) {
  os << "fgmreslab " << fgl_version() << " report\n";
  os << "command: " << command << "\n";
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(st.canonical(command)));
  os << "config hash: " << hash << "\n";
  os << "prng: " << fgl_rng_version() << "\n";
  os << "constants: c(n,k)=1, c13(n,k)=1, c0(n)=18.53*n^(3/2)\n";
  os << "formats:\n";
  for (int i = 0; i < fgl_format_count(); ++i) {
    char name[16];
    fgl_format_name(i, name, sizeof name);
    int t, emin, emax;
    double u;
    fgl_format_query(name, &t, &emin, &emax, &u);
    os << "  " << name << ": t=" << t << " emin=" << emin << " emax=" << emax
       << " u=" << fmt(u) << "\n";
  }
  os << "problem: " << st.problem << "\n";
  os << "precond: " << st.precond << "\n";
  os << "precisions: u=" << st.u << " uA=" << st.uA << " uL=" << st.uL
     << " uR=" << st.uR << "\n";
  os << "tol: " << st.tol << "  maxit: " << st.maxit << "\n";
}

void write_report_metrics(std::ostream& os, const fgl_metrics& m) {
  os << "iterations: " << m.iterations << "  converged: " << m.converged
     << "  breakdown: " << m.breakdown << "\n";
  os << "beta: " << fmt(m.beta) << "  final alpha: " << fmt(m.final_alpha) << "\n";
  os << "BE_orig: " << fmt(m.be_orig) << "  BE_leftprec: " << fmt(m.be_leftprec)
     << "  FE: " << fmt(m.fe) << "\n";
  os << "zeta1: " << fmt(m.zeta1) << "  zeta2: " << fmt(m.zeta2)
     << "  zeta: " << fmt(m.zeta) << "  rho: " << fmt(m.rho) << "\n";
  os << "psi_A: " << fmt(m.psi_a) << " (bound " << fmt(m.psi_a_bound) << ")"
     << "  psi_L: " << fmt(m.psi_l) << " (bound " << fmt(m.psi_l_bound) << ")\n";
  os << "||Z_k||: " << fmt(m.norm_zk) << "  ||M_R dx||: " << fmt(m.norm_mr_dx)
     << "\n";
  os << "kappa(A): " << fmt(m.kappa_a) << "  kappa(Atilde): "
     << fmt(m.kappa_atilde) << "  kappa(Ahat): " << fmt(m.kappa_ahat) << "\n";
  os << "kappa(M_L): " << fmt(m.kappa_ml) << "  kappa(M_R): " << fmt(m.kappa_mr)
     << "\n";
  os << "||E_L M_L||: " << fmt(m.norm_elml) << "  ||E_R||: " << fmt(m.norm_er)
     << "  ||E_R||/||M_R^-1|| approx: " << fmt(m.er_over_mrinv) << "\n";
  os << "bounds: residual " << fmt(m.bound_residual) << " (measured "
     << fmt(m.true_residual_precond) << ")\n";
  os << "        BE_leftprec " << fmt(m.bound_be_leftprec) << " (measured "
     << fmt(m.be_leftprec) << ")\n";
  os << "        BE_orig " << fmt(m.bound_be_orig) << " (measured "
     << fmt(m.be_orig) << ")\n";
  os << "        FE(left) " << fmt(m.bound_fe_left) << ", FE(split) "
     << fmt(m.bound_fe_split) << " (measured " << fmt(m.fe) << ")\n";
  os << "assumptions: 2.12(n+1)u = " << fmt(m.nu_value) << " -> "
     << (m.ok_nu ? "pass" : "fail") << "\n";
  os << "             c0(n)*u*kappa(C) with kappa(C) = " << fmt(m.kappa_c)
     << " -> " << (m.ok_kappa_c ? "pass" : "fail") << "\n";
  os << "             max |sine| = " << fmt(m.max_abs_sine) << " -> "
     << (m.ok_sines ? "pass" : "fail") << "\n";
  os << "             rho = " << fmt(m.rho) << " < 1 -> "
     << (m.ok_rho ? "pass" : "fail") << "\n";
  os << "arithmetic flags: overflow=" << m.flag_overflow
     << " underflow=" << m.flag_underflow << " nan=" << m.flag_nan << "\n";
}

int solve_cell(const Handles& h, const Settings& st, const std::string& uL,
               const std::string& uR, fgl_metrics* out, std::string* reason) {
  fgl_solve_options opts{};
  opts.u = st.u.c_str();
  opts.uA = st.uA.c_str();
  opts.uL = uL.c_str();
  opts.uR = uR.c_str();
  opts.tol = parse_tol(st.tol, st.u);
  opts.maxit = st.maxit;
  fgl_result* res = nullptr;
  fgl_status rc = fgl_solve(h.prob, h.prec, &opts, &res);
  if (rc != FGL_OK && rc != FGL_ERR_MAX_ITERATIONS) {
    if (reason) *reason = std::string(fgl_status_name(rc)) + ": " + fgl_last_error();
    return static_cast<int>(rc);
  }
  fgl_status mrc = fgl_result_metrics(res, out);
  fgl_result_free(res);
  if (mrc != FGL_OK) {
    if (reason) *reason = std::string(fgl_status_name(mrc)) + ": " + fgl_last_error();
    return static_cast<int>(mrc);
  }
  return rc == FGL_OK ? 0 : 2;
}

int cmd_solve(const Settings& st) {
  Handles h;
  build_handles(st, h);
  std::filesystem::create_directories(st.out);

  fgl_metrics m{};
  std::string reason;
  int rc = solve_cell(h, st, st.uL, st.uR, &m, &reason);
  if (rc == 3) {
    std::cerr << "error: preconditioner singular in the requested format ("
              << reason << ")\n";
    return 3;
  }
  if (rc != 0 && rc != 2) {
    std::cerr << "error: " << reason << "\n";
    return 1;
  }

  std::ofstream csv(st.out + "/results.csv");
  csv << kCsvHeader << "\n";
  csv << csv_row(h.label, st.precond, st, st.uL, st.uR, m) << "\n";

  std::ofstream rep(st.out + "/report.txt");
  write_metadata(rep, "solve", st);
  rep << "factor-format: " << h.effective_factor_format << "\n\n";
  write_report_metrics(rep, m);

  std::cout << h.label << ": IC=" << m.iterations
            << " converged=" << m.converged << " BE=" << fmt(m.be_orig)
            << " FE=" << fmt(m.fe) << "\n";
  return rc;
}

int cmd_grid(const Settings& st) {
  Handles h;
  build_handles(st, h);
  std::filesystem::create_directories(st.out);

  std::vector<std::string> uLs = split_list(st.uL_list);
  std::vector<std::string> uRs = split_list(st.uR_list);
  if (uLs.empty() || uRs.empty()) usage_error("empty precision grid");
  for (const std::string& f : uLs) check_format_name(f, "uL-list");
  for (const std::string& f : uRs) check_format_name(f, "uR-list");

  std::ofstream longcsv(st.out + "/grid.csv");
  longcsv << kCsvHeader << ",reason\n";

  std::map<std::string, std::ofstream> mats;
  for (const char* name : {"BE", "FE", "zeta", "IC", "rho"}) {
    mats.emplace(name, std::ofstream(st.out + "/" + name + ".csv"));
    auto& f = mats.at(name);
    f << "uL\\uR";
    for (const std::string& ur : uRs) f << "," << ur;
    f << "\n";
  }

  for (const std::string& ul : uLs) {
    for (auto& [k, f] : mats) f << ul;
    for (const std::string& ur : uRs) {
      fgl_metrics m{};
      std::string reason;
      int rc = solve_cell(h, st, ul, ur, &m, &reason);
      if (rc == 0 || rc == 2) {
        longcsv << csv_row(h.label, st.precond, st, ul, ur, m) << ",\n";
        mats.at("BE") << "," << fmt(m.be_orig);
        mats.at("FE") << "," << fmt(m.fe);
        mats.at("zeta") << "," << fmt(m.zeta);
        mats.at("IC") << "," << m.iterations;
        mats.at("rho") << "," << fmt(m.rho);
      } else {
        longcsv << h.label << "," << st.precond << "," << st.uA << "," << ul
                << "," << ur << ",0,0";
        for (int i = 0; i < 17; ++i) longcsv << ",nan";
        longcsv << "," << reason << "\n";
        for (auto& [k, f] : mats) f << ",nan";
      }
    }
    for (auto& [k, f] : mats) f << "\n";
  }

  std::ofstream rep(st.out + "/report.txt");
  write_metadata(rep, "grid", st);
  rep << "uL-list: " << st.uL_list << "\nuR-list: " << st.uR_list << "\n";
  rep << "cells: " << uLs.size() * uRs.size() << "\n";

  std::cout << "grid written to " << st.out << " (" << uLs.size() << "x"
            << uRs.size() << " cells)\n";
  return 0;
}

int cmd_recommend(const Settings& st) {
  Handles h;
  build_handles(st, h);
  std::filesystem::create_directories(st.out);

  // pilot in uniform working precision
  fgl_solve_options pilot_opts{};
  pilot_opts.u = st.u.c_str();
  pilot_opts.uA = st.u.c_str();
  pilot_opts.uL = st.u.c_str();
  pilot_opts.uR = st.u.c_str();
  pilot_opts.tol = parse_tol(st.tol, st.u);
  pilot_opts.maxit = st.maxit;
  fgl_result* pilot = nullptr;
  fgl_status rc = fgl_solve(h.prob, h.prec, &pilot_opts, &pilot);
  if (rc != FGL_OK && rc != FGL_ERR_MAX_ITERATIONS) {
    std::cerr << "error: pilot solve failed: " << fgl_last_error() << "\n";
    return rc == FGL_ERR_SINGULAR_IN_FORMAT ? 3 : 1;
  }
  fgl_metrics pm{};
  fgl_result_metrics(pilot, &pm);

  fgl_recommendation* rec = nullptr;
  fgl_status rrc = fgl_recommend(pilot, st.u.c_str(), &rec);
  fgl_result_free(pilot);
  if (rrc != FGL_OK && rrc != FGL_ERR_NO_FORMAT_SATISFIES) {
    std::cerr << "error: recommendation failed: " << fgl_last_error() << "\n";
    fgl_recommendation_free(rec);
    return 1;
  }
  std::string ruA = fgl_recommendation_format(rec, 'A');
  std::string ruL = fgl_recommendation_format(rec, 'L');
  std::string ruR = fgl_recommendation_format(rec, 'R');
  std::string rationale = fgl_recommendation_rationale(rec);
  bool feasible = fgl_recommendation_feasible(rec, 'A') &&
                  fgl_recommendation_feasible(rec, 'L') &&
                  fgl_recommendation_feasible(rec, 'R');
  fgl_recommendation_free(rec);

  // verification solve at the recommended configuration
  Settings vs = st;
  vs.uA = ruA;
  vs.uL = ruL;
  vs.uR = ruR;
  fgl_metrics vm{};
  std::string reason;
  int vrc = solve_cell(h, vs, ruL, ruR, &vm, &reason);
  if (vrc != 0 && vrc != 2) {
    std::cerr << "error: verification solve failed: " << reason << "\n";
    return vrc == 3 ? 3 : 1;
  }

  std::ofstream csv(st.out + "/results.csv");
  csv << kCsvHeader << "\n";
  csv << csv_row(h.label + "_pilot", st.precond, st, st.u, st.u, pm) << "\n";
  csv << csv_row(h.label + "_verify", st.precond, vs, ruL, ruR, vm) << "\n";

  std::ofstream out(st.out + "/recommend.txt");
  write_metadata(out, "recommend", st);
  out << "\npilot (u=uA=uL=uR=" << st.u << "): IC=" << pm.iterations
      << " BE=" << fmt(pm.be_orig) << " psi_A=" << fmt(pm.psi_a)
      << " psi_L=" << fmt(pm.psi_l) << " ||E_L M_L||=" << fmt(pm.norm_elml)
      << " ||E_R||=" << fmt(pm.norm_er) << "\n\n";
  out << "recommended: uA=" << ruA << " uL=" << ruL << " uR=" << ruR
      << (feasible ? "" : "  (some criteria unsatisfiable)") << "\n\n";
  out << "rationale:\n" << rationale << "\n";
  out << "verification (uA=" << ruA << ", uL=" << ruL << ", uR=" << ruR
      << "): IC=" << vm.iterations << " converged=" << vm.converged
      << " BE=" << fmt(vm.be_orig) << "\n";

  std::cout << "recommended uA=" << ruA << " uL=" << ruL << " uR=" << ruR
            << "; verification BE=" << fmt(vm.be_orig) << "\n";
  return vrc;
}

void apply_config(CLI::App* cmd, Settings& st,
                  const std::map<std::string, std::string>& cfg) {
  auto set_if_default = [&](const char* flag, const char* key, auto& field) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return;
    if (cmd->count(flag) > 0) return;  // flags override the config file
    std::istringstream is(it->second);
    is >> field;
  };
  set_if_default("--problem", "problem", st.problem);
  set_if_default("--precond", "precond", st.precond);
  set_if_default("--factor-format", "factor-format", st.factor_format);
  set_if_default("--u", "u", st.u);
  set_if_default("--uA", "uA", st.uA);
  set_if_default("--uL", "uL", st.uL);
  set_if_default("--uR", "uR", st.uR);
  set_if_default("--tol", "tol", st.tol);
  set_if_default("--maxit", "maxit", st.maxit);
  set_if_default("--out", "out", st.out);
  set_if_default("--uL-list", "uL-list", st.uL_list);
  set_if_default("--uR-list", "uR-list", st.uR_list);
}

void add_common(CLI::App* cmd, Settings& st, std::string& config_path) {
  cmd->add_option("--problem", st.problem,
                  "synthetic:c=C[,n=N,seed=S] or file:PATH[,seed=S]");
  cmd->add_option("--precond", st.precond, "none|left|right|split");
  cmd->add_option("--factor-format", st.factor_format,
                  "LU factorization format (default: mp4 if synthetic c<6, else single)");
  cmd->add_option("--u", st.u, "working precision format");
  cmd->add_option("--uA", st.uA, "matrix-product format");
  cmd->add_option("--uL", st.uL, "left-preconditioner format");
  cmd->add_option("--uR", st.uR, "right-preconditioner format");
  cmd->add_option("--tol", st.tol, "convergence tolerance: 4u or a number");
  cmd->add_option("--maxit", st.maxit, "maximum iterations");
  cmd->add_option("--out", st.out, "output directory");
  cmd->add_option("--config", config_path, "flat key=value config file");
}

void validate(const Settings& st, const std::string& command) {
  if (st.problem.empty()) usage_error("--problem is required (flag or config)");
  if (st.precond != "none" && st.precond != "left" && st.precond != "right" &&
      st.precond != "split")
    usage_error("--precond must be none|left|right|split");
  for (const std::string& f : {st.u, st.uA, st.uL, st.uR})
    check_format_name(f, "precision flag");
  if (st.maxit <= 0) usage_error("--maxit must be positive");
  (void)command;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fgmreslab: mixed-precision FGMRES experiments"};
  app.require_subcommand(1);

  Settings st_solve, st_grid, st_rec;
  std::string cfg_solve, cfg_grid, cfg_rec;

  CLI::App* solve = app.add_subcommand("solve", "run one solve with diagnostics");
  add_common(solve, st_solve, cfg_solve);

  CLI::App* grid = app.add_subcommand("grid", "sweep uL x uR and emit heatmap CSVs");
  add_common(grid, st_grid, cfg_grid);
  grid->add_option("--uL-list", st_grid.uL_list, "comma-separated uL formats");
  grid->add_option("--uR-list", st_grid.uR_list, "comma-separated uR formats");

  CLI::App* rec = app.add_subcommand("recommend",
                                     "pilot solve, precision suggestion, verification");
  add_common(rec, st_rec, cfg_rec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      if (!cfg_solve.empty()) apply_config(solve, st_solve, load_config(cfg_solve));
      validate(st_solve, "solve");
      return cmd_solve(st_solve);
    }
    if (grid->parsed()) {
      if (!cfg_grid.empty()) apply_config(grid, st_grid, load_config(cfg_grid));
      validate(st_grid, "grid");
      return cmd_grid(st_grid);
    }
    if (rec->parsed()) {
      if (!cfg_rec.empty()) apply_config(rec, st_rec, load_config(cfg_rec));
      validate(st_rec, "recommend");
      return cmd_recommend(st_rec);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
