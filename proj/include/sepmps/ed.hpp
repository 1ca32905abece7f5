#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sepmps/partition.hpp"
#include "sepmps/spin_models.hpp"

namespace sepmps {

// Exact-diagonalization ground truth. This module keeps its own index
// arithmetic (mixed-radix basis states, site 1 most significant) and does
// not go through the tensor contraction machinery, so agreement with the
// variational solver is meaningful evidence.

struct DenseHamiltonian {
  std::size_t dim;
  Eigen::MatrixXcd matrix;
};

inline constexpr std::size_t kDenseDimensionCap = 4096;

// Full matrix sum_terms c (1 x..x op_a x..x op_b x..x 1); d^n <= 4096.
DenseHamiltonian assemble_dense(const Hamiltonian& h);

// Lowest eigenvalue via dense diagonalization (d^n <= 4096).
double dense_ground_energy(const Hamiltonian& h);

// Lowest eigenvalue via matrix-free Lanczos; usable to d^n ~ 2e6.
double krylov_ground_energy(const Hamiltonian& h);

// y += H x without materializing the matrix.
void apply_hamiltonian(const Hamiltonian& h, const Complex* x, Complex* y);

struct BlockOracleResult {
  double energy = 0.0;
  bool converged = false;
  std::size_t total_iterations = 0;
};

// Best product-state energy over a bipartition: alternately fix one part,
// diagonalize the other part's effective matrix, and keep the lowest
// converged energy over seeded multistarts. Each part's dimension must be
// at most 256. A one-part spec degenerates to dense diagonalization.
BlockOracleResult alternating_block_oracle(const Hamiltonian& h,
                                           const PartitionSpec& spec,
                                           std::size_t multistarts,
                                           std::uint64_t seed);

}  // namespace sepmps
