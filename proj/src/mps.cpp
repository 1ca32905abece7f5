#include "sepmps/mps.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "sepmps/rng.hpp"
#include "transfer.hpp"

namespace sepmps {

namespace {

using detail::map2;
using detail::step_left;
using detail::step_right;

Eigen::MatrixXcd one_by_one() {
  Eigen::MatrixXcd e(1, 1);
  e(0, 0) = 1.0;
  return e;
}

// <a|b> via left-to-right transfer.
Complex overlap_impl(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.n() != b.n() || a.d() != b.d()) {
    throw ShapeError("overlap: incompatible states");
  }
  Eigen::MatrixXcd env = one_by_one();
  for (std::size_t i = 1; i <= a.n(); ++i) {
    env = step_left(env, a.site(i), b.site(i), nullptr);
  }
  return env(0, 0);
}

}  // namespace

MatrixProductState::MatrixProductState(std::vector<Tensor> site_tensors,
                                       std::size_t d)
    : tensors_(std::move(site_tensors)), d_(d) {
  if (tensors_.empty()) throw ShapeError("mps: need at least one site");
  profile_.dims.reserve(tensors_.size() + 1);
  profile_.dims.push_back(tensors_.front().shape()[0]);
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const auto& shape = tensors_[i].shape();
    if (shape.size() != 3 || shape[1] != d_) {
      throw ShapeError("mps: site " + std::to_string(i + 1) +
                       " is not a rank-3 tensor with physical dimension " +
                       std::to_string(d_));
    }
    if (shape[0] != profile_.dims.back()) {
      throw ShapeError("mps: bond mismatch between sites " + std::to_string(i) +
                       " and " + std::to_string(i + 1));
    }
    profile_.dims.push_back(shape[2]);
  }
  if (profile_.dims.front() != 1 || profile_.dims.back() != 1) {
    throw ShapeError("mps: open chain requires unit edge bonds");
  }
}

const Tensor& MatrixProductState::site(std::size_t i) const {
  if (i < 1 || i > tensors_.size()) {
    throw ShapeError("mps: site " + std::to_string(i) + " out of range");
  }
  return tensors_[i - 1];
}

void MatrixProductState::set_site(std::size_t i, Tensor t) {
  if (i < 1 || i > tensors_.size()) {
    throw ShapeError("mps: site " + std::to_string(i) + " out of range");
  }
  const auto& shape = t.shape();
  if (shape.size() != 3) throw ShapeError("mps: site tensor must be rank 3");
  tensors_[i - 1] = std::move(t);
  profile_.dims[i - 1] = shape[0];
  profile_.dims[i] = shape[2];
  gauge_center_.reset();
}

void MatrixProductState::set_gauge_center(std::optional<std::size_t> center) {
  if (center && (*center < 1 || *center > tensors_.size())) {
    throw ShapeError("mps: gauge center out of range");
  }
  gauge_center_ = center;
}

BondProfile clamp_profile(const BondProfile& profile, std::size_t d) {
  const std::size_t n = profile.sites();
  if (n == 0) throw ShapeError("clamp_profile: empty profile");
  if (profile.dims.front() != 1 || profile.dims.back() != 1) {
    throw ShapeError("clamp_profile: edge bonds must be 1");
  }
  BondProfile out = profile;
  for (std::size_t j = 1; j <= n; ++j) {
    // saturating multiply; d^j overflows quickly
    std::size_t reach = out.dims[j - 1] > (SIZE_MAX / d) ? SIZE_MAX
                                                         : out.dims[j - 1] * d;
    out.dims[j] = std::min(out.dims[j], reach);
  }
  for (std::size_t j = n; j-- > 0;) {
    std::size_t reach = out.dims[j + 1] > (SIZE_MAX / d) ? SIZE_MAX
                                                         : out.dims[j + 1] * d;
    out.dims[j] = std::min(out.dims[j], reach);
  }
  return out;
}

MatrixProductState random_mps(std::size_t n, std::size_t d,
                              const BondProfile& profile, std::uint64_t seed) {
  if (profile.dims.size() != n + 1) {
    throw ShapeError("random_mps: profile has " +
                     std::to_string(profile.dims.size()) + " entries, need " +
                     std::to_string(n + 1));
  }
  const BondProfile dims = clamp_profile(profile, d);
  for (int attempt = 0; attempt < 4; ++attempt) {
    RandomStream rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<Tensor> tensors;
    tensors.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
      Tensor t({dims.dims[i - 1], d, dims.dims[i]});
      for (Complex& v : t.storage()) v = rng.complex_normal();
      tensors.push_back(std::move(t));
    }
    MatrixProductState state(std::move(tensors), d);
    if (norm(state) > 0.0) return state;
  }
  throw NumericalError("random_mps: drew a zero-norm state 4 times");
}

MatrixProductState product_state(
    const std::vector<std::vector<Complex>>& locals) {
  if (locals.empty()) throw ShapeError("product_state: no sites");
  const std::size_t d = locals.front().size();
  std::vector<Tensor> tensors;
  tensors.reserve(locals.size());
  for (const auto& v : locals) {
    if (v.size() != d || d == 0) {
      throw ShapeError("product_state: inconsistent local dimensions");
    }
    tensors.emplace_back(std::vector<std::size_t>{1, d, 1}, v);
  }
  return MatrixProductState(std::move(tensors), d);
}

MatrixProductState canonicalize(const MatrixProductState& m,
                                std::size_t center) {
  const std::size_t n = m.n();
  if (center < 1 || center > n) {
    throw ShapeError("canonicalize: center out of range");
  }
  std::vector<Tensor> tensors;
  tensors.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) tensors.push_back(m.site(i));

  // left-orthonormalize 1..center-1, pushing the triangular factor right
  for (std::size_t i = 0; i + 1 < center; ++i) {
    auto [q, r] = split_orthonormal(tensors[i], {0, 1});
    tensors[i] = std::move(q);
    tensors[i + 1] = contract(r, {1}, tensors[i + 1], {0});
  }
  // right-orthonormalize n..center+1, pushing the factor left
  for (std::size_t i = n - 1; i + 1 > center; --i) {
    auto [q, r] = split_orthonormal(tensors[i], {1, 2});
    // q: (d, Dr, k) -> site tensor (k, d, Dr); r: (k, Dl) absorbs on axis 1
    tensors[i] = permute_axes(q, {2, 0, 1});
    tensors[i - 1] = contract(tensors[i - 1], {2}, r, {1});
  }

  MatrixProductState out(std::move(tensors), m.d());
  out.set_gauge_center(center);
  return out;
}

double norm(const MatrixProductState& m) {
  Complex value = overlap_impl(m, m);
  return std::sqrt(std::max(0.0, value.real()));
}

Complex overlap(const MatrixProductState& a, const MatrixProductState& b) {
  return overlap_impl(a, b);
}

double expectation(const MatrixProductState& m, const Hamiltonian& h) {
  if (h.n != m.n() || h.d != m.d()) {
    throw ShapeError("expectation: Hamiltonian does not match the state");
  }
  const std::size_t n = m.n();

  std::vector<Eigen::MatrixXcd> left(n + 1), right(n + 1);
  left[0] = one_by_one();
  for (std::size_t b = 1; b <= n; ++b) {
    left[b] = step_left(left[b - 1], m.site(b), m.site(b), nullptr);
  }
  right[n] = one_by_one();
  for (std::size_t b = n; b-- > 0;) {
    right[b] = step_right(right[b + 1], m.site(b + 1), m.site(b + 1), nullptr);
  }

  const double norm_sq = left[n](0, 0).real();
  if (!(norm_sq > 0.0)) {
    throw NumericalError("expectation: zero-norm state");
  }

  Complex total = 0.0;
  for (const auto& term : h.terms) {
    const std::size_t p1 = std::min(term.site_a, term.site_b);
    const std::size_t p2 = std::max(term.site_a, term.site_b);
    if (p1 < 1 || p2 > n || p1 == p2) {
      throw ShapeError("expectation: term sites out of range");
    }
    for (const auto& summand : term.summands) {
      const Tensor& first =
          (term.site_a < term.site_b) ? summand.op_a.matrix : summand.op_b.matrix;
      const Tensor& second =
          (term.site_a < term.site_b) ? summand.op_b.matrix : summand.op_a.matrix;
      Eigen::MatrixXcd env =
          step_left(left[p1 - 1], m.site(p1), m.site(p1), &first);
      for (std::size_t j = p1 + 1; j < p2; ++j) {
        env = step_left(env, m.site(j), m.site(j), nullptr);
      }
      env = step_left(env, m.site(p2), m.site(p2), &second);
      total += summand.coefficient * env.cwiseProduct(right[p2]).sum();
    }
  }

  const Complex value = total / norm_sq;
  if (std::abs(value.imag()) > 1e-9) {
    throw NumericalError("expectation: imaginary residue " +
                         std::to_string(value.imag()));
  }
  return value.real();
}

std::vector<MatrixProductState> extract_factors(const MatrixProductState& m) {
  const std::size_t n = m.n();
  std::vector<MatrixProductState> factors;
  std::size_t start = 1;
  for (std::size_t bond = 1; bond <= n; ++bond) {
    if (bond == n || m.profile().dims[bond] == 1) {
      std::vector<Tensor> segment;
      for (std::size_t i = start; i <= bond; ++i) segment.push_back(m.site(i));
      MatrixProductState factor(std::move(segment), m.d());
      const double factor_norm = norm(factor);
      if (factor_norm > 0.0) {
        Tensor head = factor.site(1) * Complex(1.0 / factor_norm, 0.0);
        factor.set_site(1, std::move(head));
      }
      factors.push_back(std::move(factor));
      start = bond + 1;
    }
  }
  return factors;
}

MatrixProductState tensor_product(
    const std::vector<MatrixProductState>& factors) {
  if (factors.empty()) throw ShapeError("tensor_product: no factors");
  std::vector<Tensor> tensors;
  const std::size_t d = factors.front().d();
  for (const auto& factor : factors) {
    if (factor.d() != d) {
      throw ShapeError("tensor_product: mixed physical dimensions");
    }
    for (std::size_t i = 1; i <= factor.n(); ++i) {
      tensors.push_back(factor.site(i));
    }
  }
  return MatrixProductState(std::move(tensors), d);
}

std::vector<Complex> amplitudes(const MatrixProductState& m) {
  const std::size_t n = m.n(), d = m.d();
  detail::RowMat acc(1, 1);
  acc(0, 0) = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const Tensor& a = m.site(i);
    const std::size_t dl = a.shape()[0], dr = a.shape()[2];
    // acc[(s_1..s_{i-1}), l] x A[l, (s_i, r)] -> [(s_1..s_i), r]
    detail::RowMat next = acc * map2(a, dl, d * dr);
    acc = Eigen::Map<const detail::RowMat>(
        next.data(), next.rows() * static_cast<Eigen::Index>(d),
        static_cast<Eigen::Index>(dr));
  }
  std::vector<Complex> out(static_cast<std::size_t>(acc.rows()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc(i, 0);
  return out;
}

double gauge_defect(const MatrixProductState& m, std::size_t site, bool left) {
  const Tensor& a = m.site(site);
  const std::size_t dl = a.shape()[0], d = a.shape()[1], dr = a.shape()[2];
  if (left) {
    auto mat = map2(a, dl * d, dr);
    return (mat.adjoint() * mat -
            Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dr),
                                       static_cast<Eigen::Index>(dr)))
        .norm();
  }
  auto mat = map2(a, dl, d * dr);
  return (mat * mat.adjoint() -
          Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dl),
                                     static_cast<Eigen::Index>(dl)))
      .norm();
}

void save_state(const MatrixProductState& m, std::ostream& out) {
  out << "mps " << m.n() << " " << m.d() << "\n";
  out.precision(17);
  for (std::size_t i = 1; i <= m.n(); ++i) {
    const Tensor& t = m.site(i);
    out << t.shape()[0] << " " << t.shape()[1] << " " << t.shape()[2];
    for (const Complex& v : t.storage()) {
      out << " " << v.real() << " " << v.imag();
    }
    out << "\n";
  }
}

MatrixProductState load_state(std::istream& in) {
  std::string magic;
  std::size_t n = 0, d = 0;
  if (!(in >> magic >> n >> d) || magic != "mps") {
    throw ShapeError("load_state: bad header");
  }
  std::vector<Tensor> tensors;
  tensors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t dl = 0, dp = 0, dr = 0;
    if (!(in >> dl >> dp >> dr)) throw ShapeError("load_state: truncated file");
    Tensor t({dl, dp, dr});
    for (Complex& v : t.storage()) {
      double re = 0, im = 0;
      if (!(in >> re >> im)) throw ShapeError("load_state: truncated file");
      v = Complex(re, im);
    }
    tensors.push_back(std::move(t));
  }
  return MatrixProductState(std::move(tensors), d);
}

}  // namespace sepmps
