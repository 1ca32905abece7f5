#include "sepmps/krylov.hpp"

#include <algorithm>
#include <cmath>

#include "sepmps/errors.hpp"

namespace sepmps {

namespace {

// Two passes of classical Gram-Schmidt against the stored basis.
void reorthogonalize(const std::vector<Eigen::VectorXcd>& basis,
                     Eigen::VectorXcd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& v : basis) {
      w -= v * v.dot(w);
    }
  }
}

}  // namespace

LanczosOutcome lanczos_lowest(std::size_t dim, const ApplyFn& apply,
                              const Eigen::VectorXcd& start,
                              const LanczosOptions& options) {
  if (dim == 0) throw ShapeError("lanczos_lowest: zero-dimensional operator");

  LanczosOutcome outcome;
  Eigen::VectorXcd v = start;
  double v_norm = v.norm();
  if (!(v_norm > 0.0)) {
    throw NumericalError("lanczos_lowest: zero start vector");
  }
  v /= v_norm;

  const std::size_t block =
      std::min<std::size_t>(std::max<std::size_t>(options.block_size, 2), dim);
  double scale = 0.0;
  Eigen::VectorXcd w(dim);

  while (true) {
    std::vector<Eigen::VectorXcd> basis;
    basis.reserve(block);
    std::vector<double> alpha, beta;
    basis.push_back(v);

    double ritz_value = 0.0;
    Eigen::VectorXd ritz_coeffs;
    bool exhausted = false;

    for (std::size_t j = 0; j < block; ++j) {
      apply(basis[j], w);
      ++outcome.matvecs;
      double a = std::real(basis[j].dot(w));
      alpha.push_back(a);
      w -= a * basis[j];
      if (j > 0) w -= beta[j - 1] * basis[j - 1];
      reorthogonalize(basis, w);

      scale = std::max(scale, std::abs(a));
      if (j + 1 < block) {
        double b = w.norm();
        scale = std::max(scale, b);
        if (b <= 1e-14 * std::max(scale, 1.0)) {
          exhausted = true;  // invariant subspace reached
          break;
        }
        beta.push_back(b);
        basis.push_back(w / b);
      }
    }

    // Ritz pair from the tridiagonal section.
    const std::size_t m = alpha.size();
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      tri(j, j) = alpha[j];
      if (j + 1 < m) {
        tri(j, j + 1) = beta[j];
        tri(j + 1, j) = beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
    ritz_value = solver.eigenvalues()(0);
    ritz_coeffs = solver.eigenvectors().col(0);

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
    for (std::size_t j = 0; j < m; ++j) x += ritz_coeffs(j) * basis[j];
    x.normalize();

    // Residual estimate: |beta_m * last coefficient| when the recurrence was
    // stopped by the block size, zero when the subspace closed on itself.
    double residual = 0.0;
    if (!exhausted && m == block && beta.size() == m - 1) {
      residual = std::abs(w.norm() * ritz_coeffs(m - 1));
    }

    outcome.value = ritz_value;
    outcome.vector = x;

    const double tol = options.rel_tol * std::max(scale, 1e-300);
    if (exhausted || residual <= tol || m >= dim) {
      outcome.converged = true;
      return outcome;
    }
    if (outcome.matvecs >= options.max_matvecs) {
      outcome.converged = false;
      return outcome;
    }
    v = x;  // restart from the current Ritz vector
  }
}

}  // namespace sepmps
