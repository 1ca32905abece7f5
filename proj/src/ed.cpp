#include "sepmps/ed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sepmps/rng.hpp"

namespace sepmps {

namespace {

std::size_t power(std::size_t base, std::size_t exponent) {
  std::size_t result = 1;
  for (std::size_t k = 0; k < exponent; ++k) {
    if (result > SIZE_MAX / base) throw ShapeError("ed: dimension overflow");
    result *= base;
  }
  return result;
}

// Stride of a 1-based site in the mixed-radix basis index (site 1 most
// significant, matching the row-major amplitude order).
std::size_t site_stride(std::size_t n, std::size_t d, std::size_t site) {
  return power(d, n - site);
}

Eigen::MatrixXcd op_matrix(const LocalOperator& op) {
  const std::size_t d = op.dim;
  Eigen::MatrixXcd m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          op.matrix.at({i, j});
    }
  }
  return m;
}

// Dense operator acting on a subset of sites: op on `site` embedded into
// the ordered site list `sites` (ascending), identity elsewhere.
Eigen::MatrixXcd embed_in_sites(const Eigen::MatrixXcd& op, std::size_t d,
                                const std::vector<std::size_t>& sites,
                                std::size_t site) {
  const std::size_t m = sites.size();
  std::size_t position = m;
  for (std::size_t k = 0; k < m; ++k) {
    if (sites[k] == site) position = k;
  }
  if (position == m) throw ShapeError("ed: site not in part");

  const std::size_t dim = power(d, m);
  const std::size_t stride = power(d, m - 1 - position);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const std::size_t digit = (idx / stride) % d;
    const std::size_t base = idx - digit * stride;
    for (std::size_t digit_out = 0; digit_out < d; ++digit_out) {
      const Complex v = op(static_cast<Eigen::Index>(digit_out),
                           static_cast<Eigen::Index>(digit));
      if (v == Complex{}) continue;
      out(static_cast<Eigen::Index>(base + digit_out * stride),
          static_cast<Eigen::Index>(idx)) += v;
    }
  }
  return out;
}

// Restarted Lanczos with full reorthogonalization on an explicit-apply
// operator; local to this module on purpose.
double lanczos_ground(std::size_t dim,
                      const std::function<void(const Eigen::VectorXcd&,
                                               Eigen::VectorXcd&)>& apply,
                      std::uint64_t seed) {
  RandomStream rng(seed);
  Eigen::VectorXcd v(dim);
  for (std::size_t i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  v.normalize();

  const std::size_t block = std::min<std::size_t>(dim, 64);
  const std::size_t max_restarts = 200;
  double value = 0.0;
  Eigen::VectorXcd w(dim);

  for (std::size_t restart = 0; restart < max_restarts; ++restart) {
    std::vector<Eigen::VectorXcd> basis{v};
    std::vector<double> alpha, beta;
    bool exhausted = false;
    double scale = 0.0;

    for (std::size_t j = 0; j < block; ++j) {
      apply(basis[j], w);
      const double a = std::real(basis[j].dot(w));
      alpha.push_back(a);
      scale = std::max(scale, std::abs(a));
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : basis) w -= u * u.dot(w);
      }
      if (j + 1 < block) {
        const double b = w.norm();
        scale = std::max(scale, b);
        if (b <= 1e-14 * std::max(scale, 1.0)) {
          exhausted = true;
          break;
        }
        beta.push_back(b);
        basis.push_back(w / b);
      }
    }

    const std::size_t m = alpha.size();
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      tri(j, j) = alpha[j];
      if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
    value = solver.eigenvalues()(0);

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
    for (std::size_t j = 0; j < m; ++j) {
      x += solver.eigenvectors()(j, 0) * basis[j];
    }
    x.normalize();

    double residual = 0.0;
    if (!exhausted && m == block) {
      residual = std::abs(w.norm() * solver.eigenvectors()(m - 1, 0));
    }
    if (exhausted || m >= dim || residual <= 1e-10 * std::max(scale, 1.0)) {
      return value;
    }
    v = x;
  }
  throw ConvergenceError("krylov_ground_energy: no convergence after " +
                         std::to_string(max_restarts) + " restarts");
}

}  // namespace

void apply_hamiltonian(const Hamiltonian& h, const Complex* x, Complex* y) {
  const std::size_t dim = power(h.d, h.n);
  for (const auto& term : h.terms) {
    const std::size_t stride_a = site_stride(h.n, h.d, term.site_a);
    const std::size_t stride_b = site_stride(h.n, h.d, term.site_b);
    for (const auto& summand : term.summands) {
      const Tensor& pa = summand.op_a.matrix;
      const Tensor& pb = summand.op_b.matrix;
      for (std::size_t idx = 0; idx < dim; ++idx) {
        const Complex xv = x[idx];
        if (xv == Complex{}) continue;
        const std::size_t sa = (idx / stride_a) % h.d;
        const std::size_t sb = (idx / stride_b) % h.d;
        const std::size_t base = idx - sa * stride_a - sb * stride_b;
        for (std::size_t sa_out = 0; sa_out < h.d; ++sa_out) {
          const Complex av = pa.at({sa_out, sa});
          if (av == Complex{}) continue;
          const Complex cav = summand.coefficient * av * xv;
          for (std::size_t sb_out = 0; sb_out < h.d; ++sb_out) {
            const Complex bv = pb.at({sb_out, sb});
            if (bv == Complex{}) continue;
            y[base + sa_out * stride_a + sb_out * stride_b] += cav * bv;
          }
        }
      }
    }
  }
}

DenseHamiltonian assemble_dense(const Hamiltonian& h) {
  const std::size_t dim = power(h.d, h.n);
  if (dim > kDenseDimensionCap) {
    throw ShapeError("assemble_dense: dimension " + std::to_string(dim) +
                     " exceeds the dense cap " +
                     std::to_string(kDenseDimensionCap));
  }
  DenseHamiltonian dense{dim, Eigen::MatrixXcd::Zero(dim, dim)};
  std::vector<Complex> column(dim), image(dim);
  for (std::size_t col = 0; col < dim; ++col) {
    std::fill(column.begin(), column.end(), Complex{});
    std::fill(image.begin(), image.end(), Complex{});
    column[col] = 1.0;
    apply_hamiltonian(h, column.data(), image.data());
    for (std::size_t row = 0; row < dim; ++row) {
      dense.matrix(static_cast<Eigen::Index>(row),
                   static_cast<Eigen::Index>(col)) = image[row];
    }
  }
  return dense;
}

double dense_ground_energy(const Hamiltonian& h) {
  DenseHamiltonian dense = assemble_dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense.matrix);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense_ground_energy: eigensolver failed");
  }
  return solver.eigenvalues()(0);
}

double krylov_ground_energy(const Hamiltonian& h) {
  const std::size_t dim = power(h.d, h.n);
  auto apply = [&h, dim](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    apply_hamiltonian(h, in.data(), out.data());
  };
  return lanczos_ground(dim, apply, 0x9d2c5680f1234567ULL);
}

BlockOracleResult alternating_block_oracle(const Hamiltonian& h,
                                           const PartitionSpec& spec,
                                           std::size_t multistarts,
                                           std::uint64_t seed) {
  spec.validate();
  if (spec.n != h.n) {
    throw ShapeError("alternating_block_oracle: partition does not match");
  }
  if (spec.part_count() == 1) {
    return BlockOracleResult{dense_ground_energy(h), true, 1};
  }
  if (spec.part_count() != 2) {
    throw ShapeError("alternating_block_oracle: only bipartitions supported");
  }
  if (multistarts < 1) {
    throw ShapeError("alternating_block_oracle: multistarts must be >= 1");
  }

  const auto& part_a = spec.parts[0];
  const auto& part_b = spec.parts[1];
  const std::size_t dim_a = power(h.d, part_a.size());
  const std::size_t dim_b = power(h.d, part_b.size());
  if (dim_a > 256 || dim_b > 256) {
    throw ShapeError("alternating_block_oracle: part dimension above 256");
  }

  std::vector<bool> in_a(h.n + 1, false);
  for (std::size_t site : part_a) in_a[site] = true;

  // Static pieces: terms inside one part; cross terms keep the pair.
  Eigen::MatrixXcd ha = Eigen::MatrixXcd::Zero(dim_a, dim_a);
  Eigen::MatrixXcd hb = Eigen::MatrixXcd::Zero(dim_b, dim_b);
  struct CrossTerm {
    Eigen::MatrixXcd op_on_a;
    Eigen::MatrixXcd op_on_b;
    double coefficient;
  };
  std::vector<CrossTerm> cross;

  for (const auto& term : h.terms) {
    const bool a_in_a = in_a[term.site_a];
    const bool b_in_a = in_a[term.site_b];
    for (const auto& summand : term.summands) {
      const Eigen::MatrixXcd op_a = op_matrix(summand.op_a);
      const Eigen::MatrixXcd op_b = op_matrix(summand.op_b);
      if (a_in_a && b_in_a) {
        ha += summand.coefficient *
              (embed_in_sites(op_a, h.d, part_a, term.site_a) *
               embed_in_sites(op_b, h.d, part_a, term.site_b));
      } else if (!a_in_a && !b_in_a) {
        hb += summand.coefficient *
              (embed_in_sites(op_a, h.d, part_b, term.site_a) *
               embed_in_sites(op_b, h.d, part_b, term.site_b));
      } else if (a_in_a) {
        cross.push_back({embed_in_sites(op_a, h.d, part_a, term.site_a),
                         embed_in_sites(op_b, h.d, part_b, term.site_b),
                         summand.coefficient});
      } else {
        cross.push_back({embed_in_sites(op_b, h.d, part_a, term.site_b),
                         embed_in_sites(op_a, h.d, part_b, term.site_a),
                         summand.coefficient});
      }
    }
  }

  const std::size_t max_rounds = 500;
  BlockOracleResult best;
  bool have_best = false;

  for (std::size_t start = 0; start < multistarts; ++start) {
    RandomStream rng(mix_seed(seed, start));
    Eigen::VectorXcd psi_b(dim_b);
    for (std::size_t i = 0; i < dim_b; ++i) {
      psi_b(static_cast<Eigen::Index>(i)) =
          Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    psi_b.normalize();

    double energy = 0.0;
    double previous = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    std::size_t rounds = 0;
    Eigen::VectorXcd psi_a;

    for (std::size_t round = 0; round < max_rounds; ++round) {
      ++rounds;
      // effective matrix on A for fixed |psi_b>
      Eigen::MatrixXcd eff_a = ha;
      const Complex eb = psi_b.dot(hb * psi_b);
      eff_a += eb.real() * Eigen::MatrixXcd::Identity(dim_a, dim_a);
      for (const auto& ct : cross) {
        // partial expectations of non-Hermitian pair members are complex;
        // only the summed effective matrix is Hermitian
        const Complex w = psi_b.dot(ct.op_on_b * psi_b);
        eff_a += (ct.coefficient * w) * ct.op_on_a;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solve_a(eff_a);
      psi_a = solve_a.eigenvectors().col(0);

      // effective matrix on B for fixed |psi_a>
      Eigen::MatrixXcd eff_b = hb;
      const Complex ea = psi_a.dot(ha * psi_a);
      eff_b += ea.real() * Eigen::MatrixXcd::Identity(dim_b, dim_b);
      for (const auto& ct : cross) {
        const Complex w = psi_a.dot(ct.op_on_a * psi_a);
        eff_b += (ct.coefficient * w) * ct.op_on_b;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solve_b(eff_b);
      psi_b = solve_b.eigenvectors().col(0);
      energy = solve_b.eigenvalues()(0);

      if (round > 0 && std::abs(energy - previous) < 1e-12) {
        converged = true;
        break;
      }
      previous = energy;
    }

    best.total_iterations += rounds;
    if (!have_best || energy < best.energy) {
      best.energy = energy;
      best.converged = converged;
      have_best = true;
    } else if (converged && std::abs(energy - best.energy) < 1e-10 &&
               !best.converged) {
      best.converged = true;
    }
  }
  return best;
}

}  // namespace sepmps
