#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "densela.hpp"
#include "oracle.hpp"

namespace fgl {

struct Problem {
  enum class Kind { synthetic, file, custom };

  DenseMatrix A;
  Vector b;
  int n = 0;
  std::string label;
  Kind kind = Kind::custom;
  double c = 0.0;
  uint64_t seed = 0;
  std::string path;
};

struct SyntheticFactors {
  DenseMatrix U, V;
  Vector d;  // diagonal of D
};

// A = U D V with U, V Haar-random orthogonal (QR of seeded Gaussians, R
// diagonal forced positive) and D = diag(10^{-c(j-1)/(n-1)}); kappa_2(A)
// is 10^c by construction. b has uniform (0,1) entries from the same
// seeded stream.
Problem synthetic_problem(int n, double c, uint64_t seed,
                          SyntheticFactors* factors = nullptr);

Problem make_problem(std::string label, DenseMatrix A, Vector b);

// MatrixMarket reader: coordinate or array, real (or integer) field,
// general or symmetric. Dense storage; b is generated from the seed as in
// synthetic_problem. Throws ParseError / UnsupportedFieldError.
Problem load_matrix_market(const std::string& path, uint64_t seed);
Problem read_matrix_market(std::istream& in, const std::string& label, uint64_t seed);

// Array-format writer with 17 significant digits (bit round-trips).
void write_matrix_market(const DenseMatrix& A, std::ostream& out);
void write_matrix_market(const DenseMatrix& A, const std::string& path);

// Pair-precision LU with partial pivoting plus one refinement step.
QVector reference_solution_quad(const Problem& p);
Vector reference_solution(const Problem& p);

}  // namespace fgl
