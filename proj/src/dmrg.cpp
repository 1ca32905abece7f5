#include "sepmps/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sepmps/krylov.hpp"
#include "sepmps/rng.hpp"
#include "sepmps/tensor.hpp"
#include "transfer.hpp"

namespace sepmps {

namespace {

using detail::map2;
using detail::RowMat;
using detail::step_left;
using detail::step_right;

using MapRow = Eigen::Map<RowMat>;
using MapRowConst = Eigen::Map<const RowMat>;

// One Kronecker factor triple of the effective operator; null means
// identity on that slot.
struct KronTriple {
  const Eigen::MatrixXcd* left = nullptr;
  const Tensor* mid = nullptr;
  const Eigen::MatrixXcd* right = nullptr;
};

struct EffectiveOperator {
  std::size_t dl = 1, d = 1, dr = 1;
  const Eigen::MatrixXcd* closed_left = nullptr;
  const Eigen::MatrixXcd* closed_right = nullptr;
  std::vector<KronTriple> triples;

  std::size_t dim() const { return dl * d * dr; }
};

EffectiveOperator gather_effective(const MatrixProductState& m,
                                   EnvironmentCache& cache, std::size_t site) {
  const auto& left = cache.left(m, site - 1);
  const auto& right = cache.right(m, site);

  EffectiveOperator op;
  const auto& shape = m.site(site).shape();
  op.dl = shape[0];
  op.d = shape[1];
  op.dr = shape[2];
  op.closed_left = &left.closed;
  op.closed_right = &right.closed;

  const auto& summands = cache.summands();
  for (std::size_t g = 0; g < summands.size(); ++g) {
    const auto& s = summands[g];
    if (s.p1 == site) {
      op.triples.push_back({nullptr, &s.op_first, &right.open[g]});
    } else if (s.p2 == site) {
      op.triples.push_back({&left.open[g], &s.op_second, nullptr});
    } else if (s.p1 < site && site < s.p2) {
      op.triples.push_back({&left.open[g], nullptr, &right.open[g]});
    }
  }
  return op;
}

// y += (L (x) M (x) R) x with identity for null slots.
void apply_effective(const EffectiveOperator& op, const Complex* x, Complex* y,
                     std::vector<Complex>& scratch_a,
                     std::vector<Complex>& scratch_b) {
  const std::size_t dl = op.dl, d = op.d, dr = op.dr;
  const std::size_t dim = op.dim();
  scratch_a.resize(dim);
  scratch_b.resize(dim);

  MapRowConst x_l(x, dl, d * dr);
  MapRow y_l(y, dl, d * dr);
  MapRowConst x_r(x, dl * d, dr);
  MapRow y_r(y, dl * d, dr);

  std::fill(y, y + dim, Complex{});
  if (op.closed_left->size() > 0) {
    y_l.noalias() += (*op.closed_left) * x_l;
  }
  if (op.closed_right->size() > 0) {
    y_r.noalias() += x_r * op.closed_right->transpose();
  }

  for (const auto& triple : op.triples) {
    const Complex* cur = x;
    if (triple.left) {
      MapRow tmp(scratch_a.data(), dl, d * dr);
      tmp.noalias() = (*triple.left) * MapRowConst(cur, dl, d * dr);
      cur = scratch_a.data();
    }
    if (triple.mid) {
      auto o = detail::op_map(*triple.mid);
      MapRow tmp(scratch_b.data(), dl * d, dr);
      for (std::size_t l = 0; l < dl; ++l) {
        tmp.middleRows(static_cast<Eigen::Index>(l * d),
                       static_cast<Eigen::Index>(d))
            .noalias() = o * MapRowConst(cur + l * d * dr, d, dr);
      }
      cur = scratch_b.data();
    }
    if (triple.right) {
      y_r.noalias() +=
          MapRowConst(cur, dl * d, dr) * triple.right->transpose();
    } else {
      for (std::size_t i = 0; i < dim; ++i) y[i] += cur[i];
    }
  }
}

Tensor assemble_effective(const EffectiveOperator& op) {
  const std::size_t dl = op.dl, d = op.d, dr = op.dr;
  const std::size_t dim = op.dim();
  Tensor out({dim, dim});
  MapRow h(out.data(), dim, dim);

  auto add_kron = [&](const Eigen::MatrixXcd* left, const Tensor* mid,
                      const Eigen::MatrixXcd* right) {
    for (std::size_t l = 0; l < dl; ++l) {
      for (std::size_t lp = 0; lp < dl; ++lp) {
        Complex lv = left ? (*left)(static_cast<Eigen::Index>(l),
                                    static_cast<Eigen::Index>(lp))
                          : Complex(l == lp ? 1.0 : 0.0);
        if (lv == Complex{}) continue;
        for (std::size_t s = 0; s < d; ++s) {
          for (std::size_t sp = 0; sp < d; ++sp) {
            Complex mv = mid ? lv * mid->at({s, sp})
                             : (s == sp ? lv : Complex{});
            if (mv == Complex{}) continue;
            const std::size_t row_base = (l * d + s) * dr;
            const std::size_t col_base = (lp * d + sp) * dr;
            for (std::size_t r = 0; r < dr; ++r) {
              for (std::size_t rp = 0; rp < dr; ++rp) {
                Complex rv = right ? (*right)(static_cast<Eigen::Index>(r),
                                              static_cast<Eigen::Index>(rp))
                                   : Complex(r == rp ? 1.0 : 0.0);
                if (rv == Complex{}) continue;
                h(static_cast<Eigen::Index>(row_base + r),
                  static_cast<Eigen::Index>(col_base + rp)) += mv * rv;
              }
            }
          }
        }
      }
    }
  };

  add_kron(op.closed_left, nullptr, nullptr);
  add_kron(nullptr, nullptr, op.closed_right);
  for (const auto& triple : op.triples) {
    add_kron(triple.left, triple.mid, triple.right);
  }
  return out;
}

void require_center(const MatrixProductState& m, std::size_t site,
                    const char* where) {
  if (!m.gauge_center() || *m.gauge_center() != site) {
    throw NumericalError(std::string(where) + ": gauge not centered at site " +
                         std::to_string(site));
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (bond_dim < 1) throw ShapeError("solver: D must be >= 1");
  if (max_sweeps < 1) throw ShapeError("solver: max_sweeps must be >= 1");
  if (!(rel_tol > 0.0)) throw ShapeError("solver: rel_tol must be > 0");
  if (restarts < 1) throw ShapeError("solver: restarts must be >= 1");
}

EnvironmentCache::EnvironmentCache(const Hamiltonian& h)
    : hamiltonian_(&h), n_(h.n) {
  for (const auto& term : h.terms) {
    if (term.site_a == term.site_b || term.site_a < 1 || term.site_b < 1 ||
        term.site_a > n_ || term.site_b > n_) {
      throw ShapeError("environment cache: invalid term sites");
    }
    const bool ordered = term.site_a < term.site_b;
    const std::size_t p1 = ordered ? term.site_a : term.site_b;
    const std::size_t p2 = ordered ? term.site_b : term.site_a;
    for (const auto& summand : term.summands) {
      const LocalOperator& first = ordered ? summand.op_a : summand.op_b;
      const LocalOperator& second = ordered ? summand.op_b : summand.op_a;
      summands_.push_back(Summand{
          p1, p2, first.matrix * Complex(summand.coefficient, 0.0),
          second.matrix});
    }
  }

  spanning_.assign(n_ + 1, {});
  opening_.assign(n_ + 2, {});
  closing_.assign(n_ + 2, {});
  for (std::size_t g = 0; g < summands_.size(); ++g) {
    opening_[summands_[g].p1].push_back(g);
    closing_[summands_[g].p2].push_back(g);
    for (std::size_t b = summands_[g].p1; b < summands_[g].p2; ++b) {
      spanning_[b].push_back(g);
    }
  }

  left_.resize(n_ + 1);
  right_.resize(n_ + 1);
  for (auto& b : left_) b.open.resize(summands_.size());
  for (auto& b : right_) b.open.resize(summands_.size());
  invalidate_all();
}

const std::vector<std::size_t>& EnvironmentCache::spanning(
    std::size_t boundary) const {
  return spanning_.at(boundary);
}

void EnvironmentCache::invalidate_from(std::size_t site) {
  for (std::size_t b = site; b <= n_; ++b) left_[b].valid = false;
  for (std::size_t b = 0; b < site; ++b) right_[b].valid = false;
}

void EnvironmentCache::invalidate_all() {
  for (auto& b : left_) b.valid = false;
  for (auto& b : right_) b.valid = false;
  left_[0].valid = true;
  left_[0].closed = Eigen::MatrixXcd::Zero(1, 1);
  right_[n_].valid = true;
  right_[n_].closed = Eigen::MatrixXcd::Zero(1, 1);
}

void EnvironmentCache::build_left(const MatrixProductState& m,
                                  std::size_t boundary) {
  const Boundary& src = left_[boundary - 1];
  Boundary& dst = left_[boundary];
  const Tensor& a = m.site(boundary);

  dst.closed = step_left(src.closed, a, a, nullptr);
  for (std::size_t g : closing_[boundary]) {
    dst.closed += step_left(src.open[g], a, a, &summands_[g].op_second);
  }
  const std::size_t dim_in = a.shape()[0];
  for (std::size_t g : spanning_[boundary]) {
    if (summands_[g].p1 == boundary) {
      dst.open[g] = step_left(
          Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim_in),
                                     static_cast<Eigen::Index>(dim_in)),
          a, a, &summands_[g].op_first);
    } else {
      dst.open[g] = step_left(src.open[g], a, a, nullptr);
    }
  }
  dst.valid = true;
}

void EnvironmentCache::build_right(const MatrixProductState& m,
                                   std::size_t boundary) {
  const Boundary& src = right_[boundary + 1];
  Boundary& dst = right_[boundary];
  const Tensor& a = m.site(boundary + 1);

  dst.closed = step_right(src.closed, a, a, nullptr);
  for (std::size_t g : opening_[boundary + 1]) {
    dst.closed += step_right(src.open[g], a, a, &summands_[g].op_first);
  }
  const std::size_t dim_in = a.shape()[2];
  for (std::size_t g : spanning_[boundary]) {
    if (summands_[g].p2 == boundary + 1) {
      dst.open[g] = step_right(
          Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim_in),
                                     static_cast<Eigen::Index>(dim_in)),
          a, a, &summands_[g].op_second);
    } else {
      dst.open[g] = step_right(src.open[g], a, a, nullptr);
    }
  }
  dst.valid = true;
}

const EnvironmentCache::Boundary& EnvironmentCache::left(
    const MatrixProductState& m, std::size_t boundary) {
  if (m.n() != n_) throw ShapeError("environment cache: state size mismatch");
  if (!m.gauge_center() || *m.gauge_center() <= boundary) {
    throw NumericalError(
        "environment cache: left environments need left-orthonormal sites");
  }
  std::size_t start = boundary;
  while (!left_[start].valid) --start;  // left_[0] is always valid
  for (std::size_t b = start + 1; b <= boundary; ++b) build_left(m, b);
  return left_[boundary];
}

const EnvironmentCache::Boundary& EnvironmentCache::right(
    const MatrixProductState& m, std::size_t boundary) {
  if (m.n() != n_) throw ShapeError("environment cache: state size mismatch");
  if (!m.gauge_center() || *m.gauge_center() > boundary + 1) {
    throw NumericalError(
        "environment cache: right environments need right-orthonormal sites");
  }
  std::size_t start = boundary;
  while (!right_[start].valid) ++start;  // right_[n] is always valid
  for (std::size_t b = start; b-- > boundary;) build_right(m, b);
  return right_[boundary];
}

Tensor effective_hamiltonian(const MatrixProductState& m, const Hamiltonian& h,
                             std::size_t site, EnvironmentCache& cache) {
  if (&cache.hamiltonian() != &h) {
    throw ShapeError("effective_hamiltonian: cache built for another Hamiltonian");
  }
  require_center(m, site, "effective_hamiltonian");
  return assemble_effective(gather_effective(m, cache, site));
}

double local_update(MatrixProductState& m, const Hamiltonian& h,
                    std::size_t site, EnvironmentCache& cache,
                    const SolverConfig& config, Step move) {
  require_center(m, site, "local_update");
  EffectiveOperator op = gather_effective(m, cache, site);
  const std::size_t dim = op.dim();
  const std::size_t dl = op.dl, d = op.d, dr = op.dr;

  double energy = 0.0;
  Tensor new_site({dl, d, dr});

  try {
    if (dim <= config.dense_threshold) {
      Tensor heff = assemble_effective(op);
      EigenSolveOptions opts;
      opts.dense_threshold = std::max<std::size_t>(dim, 1);
      EigenPairs pairs = hermitian_lowest(heff, 1, opts);
      energy = pairs.values[0];
      std::copy(pairs.vectors.data(), pairs.vectors.data() + dim,
                new_site.data());
    } else {
      Eigen::VectorXcd start(static_cast<Eigen::Index>(dim));
      std::copy(m.site(site).data(), m.site(site).data() + dim, start.data());
      std::vector<Complex> scratch_a, scratch_b;
      ApplyFn apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out.resize(static_cast<Eigen::Index>(dim));
        apply_effective(op, in.data(), out.data(), scratch_a, scratch_b);
      };
      LanczosOptions lopts;
      lopts.max_matvecs = config.max_krylov_iters;
      lopts.rel_tol = 1e-10;
      LanczosOutcome outcome = lanczos_lowest(dim, apply, start, lopts);
      // An unconverged outcome is still a variational improvement over the
      // warm start; the sweep-level tolerance governs the final quality.
      energy = outcome.value;
      std::copy(outcome.vector.data(), outcome.vector.data() + dim,
                new_site.data());
    }
  } catch (const std::exception& e) {
    throw ConvergenceError("local_update at site " + std::to_string(site) +
                           ": " + e.what());
  }

  m.set_site(site, std::move(new_site));
  cache.invalidate_from(site);

  if (move == Step::Right && site < m.n()) {
    auto [q, r] = split_orthonormal(m.site(site), {0, 1});
    m.set_site(site, std::move(q));
    Tensor absorbed = contract(r, {1}, m.site(site + 1), {0});
    const double nrm = absorbed.frobenius_norm();
    if (nrm > 0.0) absorbed *= Complex(1.0 / nrm, 0.0);
    m.set_site(site + 1, std::move(absorbed));
    cache.invalidate_from(site);
    cache.invalidate_from(site + 1);
    m.set_gauge_center(site + 1);
  } else if (move == Step::Left && site > 1) {
    auto [q, r] = split_orthonormal(m.site(site), {1, 2});
    m.set_site(site, permute_axes(q, {2, 0, 1}));
    Tensor absorbed = contract(m.site(site - 1), {2}, r, {1});
    const double nrm = absorbed.frobenius_norm();
    if (nrm > 0.0) absorbed *= Complex(1.0 / nrm, 0.0);
    m.set_site(site - 1, std::move(absorbed));
    cache.invalidate_from(site - 1);
    cache.invalidate_from(site);
    m.set_gauge_center(site - 1);
  } else {
    m.set_gauge_center(site);
  }
  return energy;
}

void sweep(MatrixProductState& m, const Hamiltonian& h,
           EnvironmentCache& cache, const SolverConfig& config,
           std::vector<double>& energies) {
  const std::size_t n = m.n();
  if (n == 1) {
    energies.push_back(local_update(m, h, 1, cache, config, Step::None));
    return;
  }
  for (std::size_t i = 1; i < n; ++i) {
    energies.push_back(local_update(m, h, i, cache, config, Step::Right));
  }
  for (std::size_t i = n; i > 1; --i) {
    energies.push_back(local_update(m, h, i, cache, config, Step::Left));
  }
}

MinimizeResult minimize(const Hamiltonian& h, const BondProfile& profile,
                        const SolverConfig& config) {
  config.validate();
  if (profile.sites() != h.n) {
    throw ShapeError("minimize: profile does not match the Hamiltonian");
  }

  std::optional<MinimizeResult> best;
  std::vector<SweepReport> all_reports;

  for (std::size_t restart = 0; restart < config.restarts; ++restart) {
    const std::uint64_t seed = mix_seed(config.base_seed, restart);
    MatrixProductState state =
        canonicalize(random_mps(h.n, h.d, profile, seed), 1);
    // normalize the center so reported energies are Rayleigh quotients
    {
      const double nrm = state.site(1).frobenius_norm();
      Tensor head = state.site(1) * Complex(1.0 / nrm, 0.0);
      state.set_site(1, std::move(head));
      state.set_gauge_center(1);
    }

    EnvironmentCache cache(h);
    SweepReport report;
    report.restart_index = restart;

    double previous = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t s = 1; s <= config.max_sweeps; ++s) {
      sweep(state, h, cache, config, report.energies_per_update);
      report.sweeps_used = s;
      const double current = report.energies_per_update.back();
      if (s >= 2 &&
          std::abs(current - previous) <=
              config.rel_tol * std::max(1.0, std::abs(current))) {
        report.converged = true;
        break;
      }
      previous = current;
    }

    const double energy = report.energies_per_update.back();
    const bool better =
        !best ||
        (report.converged && !best->converged) ||
        (report.converged == best->converged && energy < best->energy);
    if (better) {
      MinimizeResult candidate{energy, state, report, {}, restart,
                               report.converged};
      best = std::move(candidate);
    }
    all_reports.push_back(std::move(report));
  }

  best->all_reports = std::move(all_reports);
  return std::move(*best);
}

MinimizeResult constrained_ground_energy(const Hamiltonian& h,
                                         const PartitionSpec& spec,
                                         const SolverConfig& config) {
  if (spec.n != h.n) {
    throw ShapeError("constrained_ground_energy: partition does not cover the chain");
  }
  const std::vector<std::size_t> ordering = site_ordering(spec);
  const Hamiltonian permuted = permute_hamiltonian(h, ordering);
  const BondProfile profile = bond_profile(spec, config.bond_dim);
  return minimize(permuted, profile, config);
}

Tensor assemble_norm_matrix(const MatrixProductState& m, std::size_t site) {
  const std::size_t n = m.n();
  Eigen::MatrixXcd left = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t b = 1; b < site; ++b) {
    left = step_left(left, m.site(b), m.site(b), nullptr);
  }
  Eigen::MatrixXcd right = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t b = n; b > site; --b) {
    right = step_right(right, m.site(b), m.site(b), nullptr);
  }

  const auto& shape = m.site(site).shape();
  const std::size_t dl = shape[0], d = shape[1], dr = shape[2];
  const std::size_t dim = dl * d * dr;
  Tensor out({dim, dim});
  for (std::size_t l = 0; l < dl; ++l) {
    for (std::size_t lp = 0; lp < dl; ++lp) {
      for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t r = 0; r < dr; ++r) {
          for (std::size_t rp = 0; rp < dr; ++rp) {
            out.at({(l * d + s) * dr + r, (lp * d + s) * dr + rp}) =
                left(static_cast<Eigen::Index>(l),
                     static_cast<Eigen::Index>(lp)) *
                right(static_cast<Eigen::Index>(r),
                      static_cast<Eigen::Index>(rp));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace sepmps
