#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sepmps/partition.hpp"
#include "sepmps/spin_models.hpp"
#include "sepmps/tensor.hpp"

namespace sepmps {

// Open-boundary matrix product state: n rank-3 site tensors of shape
// (dims[i-1], d, dims[i]) with unit edge bonds.
//
// When gauge_center = c, sites left of c satisfy sum_s A_s^dag A_s = 1 and
// sites right of c satisfy sum_s A_s A_s^dag = 1.
class MatrixProductState {
 public:
  MatrixProductState(std::vector<Tensor> site_tensors, std::size_t d);

  std::size_t n() const { return tensors_.size(); }
  std::size_t d() const { return d_; }
  const BondProfile& profile() const { return profile_; }

  // 1-based site access.
  const Tensor& site(std::size_t i) const;
  void set_site(std::size_t i, Tensor t);  // clears the gauge center

  std::optional<std::size_t> gauge_center() const { return gauge_center_; }
  void set_gauge_center(std::optional<std::size_t> center);

 private:
  std::vector<Tensor> tensors_;
  BondProfile profile_;
  std::size_t d_;
  std::optional<std::size_t> gauge_center_;
};

// Largest usable bond dimensions: each profile entry capped by the state
// space reachable from either chain end (cuts included). States are always
// built on the clamped profile so canonical forms are exact.
BondProfile clamp_profile(const BondProfile& profile, std::size_t d);

// Seeded Gaussian MPS on the clamped profile. Entries are drawn in site
// order, row-major within each tensor, real part before imaginary part;
// the same seed reproduces the state bit for bit.
MatrixProductState random_mps(std::size_t n, std::size_t d,
                              const BondProfile& profile, std::uint64_t seed);

// Product state from per-site local vectors (bond dimension 1 throughout).
MatrixProductState product_state(const std::vector<std::vector<Complex>>& locals);

// Mixed-canonical gauge with the given center; the physical state is
// unchanged and the norm is preserved.
MatrixProductState canonicalize(const MatrixProductState& m, std::size_t center);

double norm(const MatrixProductState& m);
Complex overlap(const MatrixProductState& a, const MatrixProductState& b);

// Rayleigh quotient <psi|H|psi> / <psi|psi>. Term site indices refer to
// chain positions (permute the Hamiltonian first when using a nontrivial
// partition ordering). Works in any gauge.
double expectation(const MatrixProductState& m, const Hamiltonian& h);

// Split the chain at every internal unit bond; factors are returned
// normalized, one per separable block, in chain order.
std::vector<MatrixProductState> extract_factors(const MatrixProductState& m);

// Concatenate factor chains with unit bonds in between.
MatrixProductState tensor_product(const std::vector<MatrixProductState>& factors);

// Full amplitude vector in row-major site order; intended for small n.
std::vector<Complex> amplitudes(const MatrixProductState& m);

// || sum_s A_s^dag A_s - 1 || (left) or || sum_s A_s A_s^dag - 1 || (right)
// at one site; diagnostic for the gauge invariants.
double gauge_defect(const MatrixProductState& m, std::size_t site, bool left);

// Text fixture format: header line "mps <n> <d>", then per site one line
// of the three extents followed by "re im" pairs in row-major order.
void save_state(const MatrixProductState& m, std::ostream& out);
MatrixProductState load_state(std::istream& in);

}  // namespace sepmps
