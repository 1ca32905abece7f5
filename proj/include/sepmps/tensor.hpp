#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "sepmps/errors.hpp"

namespace sepmps {

using Complex = std::complex<double>;

// Dense multi-axis array of complex doubles.
//
// Layout is row-major: the last axis runs fastest. This linearization is
// fixed and part of the serialized fixture format, so it must not change.
class Tensor {
 public:
  Tensor() = default;

  // Zero-filled tensor of the given shape.
  explicit Tensor(std::vector<std::size_t> shape);

  Tensor(std::vector<std::size_t> shape, std::vector<Complex> data);

  static Tensor identity(std::size_t n);

  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t extent(std::size_t axis) const;

  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }
  const std::vector<Complex>& storage() const { return data_; }
  std::vector<Complex>& storage() { return data_; }

  Complex& at(std::initializer_list<std::size_t> indices);
  const Complex& at(std::initializer_list<std::size_t> indices) const;

  // Same data, new shape; total size must match.
  Tensor reshaped(std::vector<std::size_t> new_shape) const;

  Tensor conjugate() const;
  double frobenius_norm() const;

  Tensor& operator*=(Complex factor);
  Tensor& operator+=(const Tensor& other);
  Tensor operator*(Complex factor) const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

 private:
  std::size_t offset_of(std::initializer_list<std::size_t> indices) const;

  std::vector<std::size_t> shape_;
  std::vector<Complex> data_;
};

// Pairwise contraction over the listed axes. axes_a[k] of `a` is summed
// against axes_b[k] of `b`; result axes are a's free axes (in order)
// followed by b's free axes. A full contraction returns shape {1}.
Tensor contract(const Tensor& a, const std::vector<std::size_t>& axes_a,
                const Tensor& b, const std::vector<std::size_t>& axes_b);

// Result axis j takes source axis perm[j] (numpy transpose convention):
// shape (2,3,4) permuted by (2,0,1) has shape (4,2,3).
Tensor permute_axes(const Tensor& a, const std::vector<std::size_t>& perm);

// Thin QR factorization of `a` viewed as a matrix with the listed axes
// grouped as rows and the remaining axes (ascending) as columns.
// Returns (q, r) with q of shape (left extents..., k), r of shape
// (k, rest extents...), k = min(rows, cols); q has orthonormal columns in
// the grouped view and contract(q, {rank-1}, r, {0}) rebuilds `a` with its
// axes ordered as (left_axes..., rest...).
std::pair<Tensor, Tensor> split_orthonormal(
    const Tensor& a, const std::vector<std::size_t>& left_axes);

struct EigenSolveOptions {
  // Dense full solve at or below this dimension, Lanczos above.
  std::size_t dense_threshold = 512;
  // Total matrix-vector product budget for the iterative path.
  std::size_t max_iterations = 5000;
  // Accepted residual, relative to the Frobenius norm of the matrix.
  double residual_tol = 1e-9;
  // Accepted Hermiticity defect, relative to the Frobenius norm.
  double hermiticity_tol = 1e-10;
};

struct EigenPairs {
  std::vector<double> values;  // ascending
  Tensor vectors;              // shape (count, dim); row k is eigenvector k
};

// The `count` smallest eigenpairs of a Hermitian matrix. Each returned
// vector v satisfies ||m v - lambda v|| <= residual_tol * ||m||_F.
EigenPairs hermitian_lowest(const Tensor& m, std::size_t count,
                            const EigenSolveOptions& options = {});

inline Complex scalar_value(const Tensor& t) {
  if (t.size() != 1) {
    throw ShapeError("scalar_value: tensor has " + std::to_string(t.size()) +
                     " entries");
  }
  return t.data()[0];
}

}  // namespace sepmps
