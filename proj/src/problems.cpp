#include "problems.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace fgl {

namespace {

// Householder QR of G; returns Q with the R diagonal forced positive
// (Haar-correct for Gaussian G).
DenseMatrix haar_orthogonal(DenseMatrix G) {
  const int n = G.rows();
  DenseMatrix Q = DenseMatrix::identity(n);
  std::vector<double> rdiag(n);
  std::vector<Vector> vs;
  vs.reserve(n);

  for (int k = 0; k < n; ++k) {
    Vector v(n - k);
    double nx = 0.0;
    for (int i = k; i < n; ++i) {
      v[i - k] = G(i, k);
      nx += v[i - k] * v[i - k];
    }
    nx = std::sqrt(nx);
    double alpha = v[0] >= 0.0 ? -nx : nx;
    rdiag[k] = alpha;
    v[0] -= alpha;
    double vn2 = 0.0;
    for (double t : v) vn2 += t * t;
    if (vn2 > 0.0) {
      // apply I - 2 v v^T / (v^T v) to the trailing block
      for (int j = k; j < n; ++j) {
        double dot = 0.0;
        for (int i = k; i < n; ++i) dot += v[i - k] * G(i, j);
        double f = 2.0 * dot / vn2;
        for (int i = k; i < n; ++i) G(i, j) -= f * v[i - k];
      }
    }
    vs.push_back(std::move(v));
  }

  // accumulate Q = H_1 H_2 ... H_n (apply reflectors to I in reverse)
  for (int k = n - 1; k >= 0; --k) {
    const Vector& v = vs[k];
    double vn2 = 0.0;
    for (double t : v) vn2 += t * t;
    if (vn2 == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      double dot = 0.0;
      for (int i = k; i < n; ++i) dot += v[i - k] * Q(i, j);
      double f = 2.0 * dot / vn2;
      for (int i = k; i < n; ++i) Q(i, j) -= f * v[i - k];
    }
  }

  for (int j = 0; j < n; ++j)
    if (rdiag[j] < 0.0)
      for (int i = 0; i < n; ++i) Q(i, j) = -Q(i, j);
  return Q;
}

uint64_t stream_seed(int n, double c, uint64_t seed) {
  return mix_seed(seed, static_cast<uint64_t>(n), std::bit_cast<uint64_t>(c));
}

}  // namespace

Problem synthetic_problem(int n, double c, uint64_t seed,
                          SyntheticFactors* factors) {
  Rng rng(stream_seed(n, c, seed));

  DenseMatrix G1(n, n), G2(n, n);
  for (double& v : G1.data()) v = rng.gaussian();
  for (double& v : G2.data()) v = rng.gaussian();
  DenseMatrix U = haar_orthogonal(std::move(G1));
  DenseMatrix V = haar_orthogonal(std::move(G2));

  Vector d(n);
  for (int j = 0; j < n; ++j) d[j] = std::pow(10.0, -c * j / (n - 1));
  if (factors) {
    factors->U = U;
    factors->V = V;
    factors->d = d;
  }

  // A = (U D) V
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) U(i, j) *= d[j];
  Problem p;
  p.A = mat_mul(U, V);
  p.b.resize(n);
  for (double& v : p.b) v = rng.uniform01();
  p.n = n;
  p.kind = Problem::Kind::synthetic;
  p.c = c;
  p.seed = seed;
  std::ostringstream lab;
  lab << "synthetic_c" << c << "_n" << n << "_s" << seed;
  p.label = lab.str();
  return p;
}

Problem make_problem(std::string label, DenseMatrix A, Vector b) {
  Problem p;
  p.n = A.rows();
  p.A = std::move(A);
  p.b = std::move(b);
  p.label = std::move(label);
  p.kind = Problem::Kind::custom;
  return p;
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Problem read_matrix_market(std::istream& in, const std::string& label, uint64_t seed) {
  long lineno = 0;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;

  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", lineno);
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("unsupported object '" + object + "'", lineno);
  if (format != "coordinate" && format != "array")
    throw ParseError("unsupported format '" + format + "'", lineno);
  if (field == "complex" || field == "pattern")
    throw UnsupportedFieldError("unsupported field '" + field + "'");
  if (field != "real" && field != "integer")
    throw ParseError("unknown field '" + field + "'", lineno);
  if (symmetry != "general" && symmetry != "symmetric")
    throw UnsupportedFieldError("unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";
  const bool coordinate = format == "coordinate";

  // skip comments and blank lines up to the size line
  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ls(line);
    if (coordinate) {
      if (!(ls >> rows >> cols >> nnz)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        throw ParseError("bad size line", lineno);
      }
    } else {
      if (!(ls >> rows >> cols)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        throw ParseError("bad size line", lineno);
      }
    }
    break;
  }
  if (rows < 0) throw ParseError("missing size line", lineno);
  if (rows != cols)
    throw ParseError("matrix is not square (" + std::to_string(rows) + "x" +
                         std::to_string(cols) + ")",
                     lineno);
  const int n = static_cast<int>(rows);
  DenseMatrix A(n, n, 0.0);

  if (coordinate) {
    long seen = 0;
    while (seen < nnz) {
      if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno + 1);
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      if (line[0] == '%') continue;
      std::istringstream ls(line);
      long i, j;
      double v;
      if (!(ls >> i >> j >> v)) throw ParseError("bad entry", lineno);
      if (i < 1 || i > n || j < 1 || j > n) throw ParseError("index out of range", lineno);
      if (!std::isfinite(v)) throw ParseError("non-finite entry", lineno);
      A(static_cast<int>(i) - 1, static_cast<int>(j) - 1) = v;
      if (symmetric && i != j)
        A(static_cast<int>(j) - 1, static_cast<int>(i) - 1) = v;
      ++seen;
    }
  } else {
    // array format is column-major; symmetric files carry the lower triangle
    long expect = symmetric ? rows * (rows + 1) / 2 : rows * cols;
    long seen = 0;
    int i = 0, j = 0;
    if (symmetric) i = j;
    while (seen < expect) {
      if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno + 1);
      ++lineno;
      std::istringstream ls(line);
      double v;
      while (ls >> v) {
        if (!std::isfinite(v)) throw ParseError("non-finite entry", lineno);
        A(i, j) = v;
        if (symmetric) A(j, i) = v;
        ++seen;
        if (++i == n) {
          ++j;
          i = symmetric ? j : 0;
        }
        if (seen == expect) break;
      }
    }
  }

  Problem p;
  p.A = std::move(A);
  p.n = n;
  p.label = label;
  p.kind = Problem::Kind::file;
  p.seed = seed;
  p.b.resize(n);
  Rng rng(stream_seed(n, 0.0, seed));
  for (double& v : p.b) v = rng.uniform01();
  return p;
}

Problem load_matrix_market(const std::string& path, uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  std::string label = path;
  size_t slash = label.find_last_of("/\\");
  if (slash != std::string::npos) label = label.substr(slash + 1);
  size_t dot = label.rfind('.');
  if (dot != std::string::npos) label = label.substr(0, dot);
  Problem p = read_matrix_market(in, label, seed);
  p.path = path;
  return p;
}

void write_matrix_market(const DenseMatrix& A, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << A.rows() << " " << A.cols() << "\n";
  char buf[64];
  for (int j = 0; j < A.cols(); ++j)
    for (int i = 0; i < A.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      out << buf << "\n";
    }
}

void write_matrix_market(const DenseMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing", 0);
  write_matrix_market(A, out);
}

QVector reference_solution_quad(const Problem& p) {
  QdLU f = qd_lu_factor(p.A);
  QVector b = qd_promote(p.b);
  QVector x = qd_lu_solve(f, b);
  // one step of refinement in pair arithmetic
  QVector r = qd_sub_vec(b, qd_matvec(p.A, x));
  QVector d = qd_lu_solve(f, r);
  for (size_t i = 0; i < x.size(); ++i) x[i] = qd_add(x[i], d[i]);
  return x;
}

Vector reference_solution(const Problem& p) {
  return qd_demote(reference_solution_quad(p));
}

}  // namespace fgl
