#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sepmps/tensor.hpp"

namespace sepmps {

enum class Spin { Half, One };

// A d x d single-site operator.
struct LocalOperator {
  Tensor matrix;    // shape (d, d)
  std::size_t dim;  // physical dimension
};

// One weighted operator-pair in a two-site interaction.
struct TermSummand {
  double coefficient;
  LocalOperator op_a;
  LocalOperator op_b;
};

// Interaction between two distinct sites, as a sum of operator pairs.
// Site indices are 1-based.
struct TwoSiteTerm {
  std::size_t site_a;
  std::size_t site_b;
  std::vector<TermSummand> summands;
};

struct Hamiltonian {
  std::size_t n;  // site count
  std::size_t d;  // per-site physical dimension
  std::vector<TwoSiteTerm> terms;
  std::string label;
};

struct SpinTriple {
  LocalOperator sx, sy, sz;
};

// Standard spin-s generators; [Sx, Sy] = i Sz.
SpinTriple spin_matrices(Spin s);

// Open-chain dimerised Heisenberg model: bond i (1-based, i = 1..n-1)
// couples sites (i, i+1) with strength (1 - (-1)^i * delta) on the
// exchange term Sx Sx + Sy Sy + Sz Sz. delta = +1 therefore strengthens
// bonds (1,2), (3,4), ...
Hamiltonian build_dimerised_heisenberg(std::size_t n, double delta);

// Open-chain spin-1 bilinear-biquadratic model: every nearest-neighbor
// bond carries S.S + alpha (S.S)^2, the quadratic part expanded into the
// nine operator pairs (S_a S_b) x (S_a S_b).
Hamiltonian build_blbq(std::size_t n, double alpha);

// Dense d^2 x d^2 matrix of one term: sum_k c_k (op_a (x) op_b), with the
// row index (s_a, s_b) in row-major order.
Tensor assemble_bond_matrix(const TwoSiteTerm& term);

}  // namespace sepmps
