#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sepmps/mps.hpp"
#include "sepmps/partition.hpp"
#include "sepmps/spin_models.hpp"

namespace sepmps {

struct SolverConfig {
  std::size_t bond_dim = 16;  // D: cap on internal bond dimensions
  std::size_t max_sweeps = 200;
  double rel_tol = 1e-10;  // sweep-to-sweep relative energy change
  std::size_t restarts = 8;
  std::uint64_t base_seed = 1;
  // Local problems at or below this dimension are solved densely.
  std::size_t dense_threshold = 512;
  // Matrix-vector budget per local Lanczos solve.
  std::size_t max_krylov_iters = 400;

  void validate() const;
};

struct SweepReport {
  std::vector<double> energies_per_update;
  std::size_t sweeps_used = 0;
  bool converged = false;
  std::size_t restart_index = 0;
};

// Per-term left/right partial contractions, keyed by boundary position.
// A boundary b sits between sites b and b+1 (b = 0..n). Left data at b is
// usable while sites 1..b are left-orthonormal, right data at b while
// sites b+1..n are right-orthonormal; entries crossing a changed site are
// invalidated and rebuilt lazily.
//
// Terms whose operators are fully absorbed are merged into one `closed`
// matrix per boundary; a term straddling the boundary keeps one open
// matrix per summand, with the summand coefficient folded into the
// operator at the smaller chain position.
class EnvironmentCache {
 public:
  explicit EnvironmentCache(const Hamiltonian& h);

  struct Boundary {
    bool valid = false;
    Eigen::MatrixXcd closed;
    std::vector<Eigen::MatrixXcd> open;  // indexed by summand id
  };

  struct Summand {
    std::size_t p1, p2;   // chain positions, p1 < p2
    Tensor op_first;      // coefficient * operator at p1
    Tensor op_second;     // operator at p2
  };

  const Hamiltonian& hamiltonian() const { return *hamiltonian_; }
  const std::vector<Summand>& summands() const { return summands_; }
  const std::vector<std::size_t>& spanning(std::size_t boundary) const;

  const Boundary& left(const MatrixProductState& m, std::size_t boundary);
  const Boundary& right(const MatrixProductState& m, std::size_t boundary);

  // Mark the site tensor as changed.
  void invalidate_from(std::size_t site);
  void invalidate_all();

 private:
  const Hamiltonian* hamiltonian_;
  std::size_t n_;
  std::vector<Summand> summands_;
  std::vector<std::vector<std::size_t>> spanning_;   // by boundary
  std::vector<std::vector<std::size_t>> opening_;    // summands with p1 == site
  std::vector<std::vector<std::size_t>> closing_;    // summands with p2 == site
  std::vector<Boundary> left_, right_;

  void build_left(const MatrixProductState& m, std::size_t boundary);
  void build_right(const MatrixProductState& m, std::size_t boundary);
};

enum class Step { None, Right, Left };

// The matrix of the energy quadratic form in site i's tensor, for a state
// in mixed-canonical gauge centered at i (so the norm matrix is the
// identity). Row/column index is the flattened (left bond, physical,
// right bond) site tensor.
Tensor effective_hamiltonian(const MatrixProductState& m, const Hamiltonian& h,
                             std::size_t site, EnvironmentCache& cache);

// Replace site i by the lowest eigenvector of its effective Hamiltonian,
// renormalize, and shift the gauge one site in the given direction.
// Returns the new energy (the lowest local eigenvalue).
double local_update(MatrixProductState& m, const Hamiltonian& h,
                    std::size_t site, EnvironmentCache& cache,
                    const SolverConfig& config, Step move);

// One left-to-right then right-to-left pass of local updates; energies are
// appended per update. Expects (and restores) gauge center 1.
void sweep(MatrixProductState& m, const Hamiltonian& h,
           EnvironmentCache& cache, const SolverConfig& config,
           std::vector<double>& energies);

struct MinimizeResult {
  double energy = 0.0;
  MatrixProductState state;
  SweepReport report;                    // best restart
  std::vector<SweepReport> all_reports;  // one per restart
  std::size_t best_restart = 0;
  bool converged = false;
};

// Best converged energy over independent seeded restarts. The Hamiltonian
// must already be in chain order.
MinimizeResult minimize(const Hamiltonian& h, const BondProfile& profile,
                        const SolverConfig& config);

// Permute the Hamiltonian to the partition's chain order, build the cut
// bond profile, and minimize. The returned state lives in chain order and
// factorizes at every part boundary.
MinimizeResult constrained_ground_energy(const Hamiltonian& h,
                                         const PartitionSpec& spec,
                                         const SolverConfig& config);

// Debug check: the norm matrix of site i assembled without any gauge
// assumption; equals the identity when the gauge is centered at i.
Tensor assemble_norm_matrix(const MatrixProductState& m, std::size_t site);

}  // namespace sepmps
