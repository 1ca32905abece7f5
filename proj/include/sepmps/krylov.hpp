#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>

namespace sepmps {

using ApplyFn =
    std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;

struct LanczosOptions {
  std::size_t max_matvecs = 5000;
  // Krylov basis size per restart cycle.
  std::size_t block_size = 48;
  // Residual tolerance relative to the largest Ritz magnitude seen.
  double rel_tol = 1e-10;
};

struct LanczosOutcome {
  double value = 0.0;
  Eigen::VectorXcd vector;
  std::size_t matvecs = 0;
  bool converged = false;
};

// Lowest eigenpair of a Hermitian operator given only its action, via
// restarted Lanczos with full reorthogonalization. The first Ritz value
// equals the Rayleigh quotient of `start`, so the returned value never
// exceeds it; warm starts keep variational sweeps monotone even when the
// iteration is stopped early.
LanczosOutcome lanczos_lowest(std::size_t dim, const ApplyFn& apply,
                              const Eigen::VectorXcd& start,
                              const LanczosOptions& options = {});

}  // namespace sepmps
