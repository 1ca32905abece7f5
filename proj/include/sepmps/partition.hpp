#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sepmps/spin_models.hpp"

namespace sepmps {

// An ordered list of disjoint site groups covering {1..n}. Within each
// part sites are listed in ascending order; the part order fixes the MPS
// chain layout.
struct PartitionSpec {
  std::vector<std::vector<std::size_t>> parts;
  std::size_t n = 0;

  std::size_t part_count() const { return parts.size(); }
  void validate() const;  // throws ShapeError on any broken invariant
};

// Per-bond dimensions of an open chain: dims has n+1 entries with
// dims[0] = dims[n] = 1; dims[j] sits between sites j and j+1.
struct BondProfile {
  std::vector<std::size_t> dims;

  std::size_t sites() const { return dims.empty() ? 0 : dims.size() - 1; }
};

// Blocks of p consecutive sites, alternately allocated to two parts;
// requires n to be an even multiple of p so both parts get equally many
// blocks. Part 1 holds blocks 1,3,5,..., part 2 blocks 2,4,6,...
PartitionSpec p_step_partition(std::size_t n, std::size_t p);

// The whole chain as a single part (no separability constraint).
PartitionSpec trivial_partition(std::size_t n);

// MPS position -> physical site: the concatenation of the parts in order.
// 1-based site values; entry j-1 is the physical site at chain position j.
std::vector<std::size_t> site_ordering(const PartitionSpec& spec);

// Bond dimensions implementing the separability cuts: 1 across every part
// boundary under site_ordering, D inside parts, 1 at the chain ends.
BondProfile bond_profile(const PartitionSpec& spec, std::size_t max_dim);

// Unconstrained profile: D on all internal bonds.
BondProfile uniform_profile(std::size_t n, std::size_t max_dim);

// Rewrite term site indices to MPS positions under `ordering` (as returned
// by site_ordering), normalizing each term so site_a < site_b.
Hamiltonian permute_hamiltonian(const Hamiltonian& h,
                                const std::vector<std::size_t>& ordering);

// CLI partition syntax: "p=<int>" or "parts=1,2,5,6|3,4,7,8".
PartitionSpec parse_partition(const std::string& text, std::size_t n);

}  // namespace sepmps
