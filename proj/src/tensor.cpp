#include "sepmps/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sepmps/krylov.hpp"
#include "sepmps/rng.hpp"

namespace sepmps {

namespace {

using RowMat =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRow = Eigen::Map<RowMat>;
using MapRowConst = Eigen::Map<const RowMat>;

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ",";
    out << shape[i];
  }
  out << ")";
  return out.str();
}

std::size_t checked_product(const std::vector<std::size_t>& shape) {
  if (shape.empty()) {
    throw ShapeError("tensor must have at least one axis");
  }
  std::size_t total = 1;
  for (std::size_t extent : shape) {
    if (extent == 0) {
      throw ShapeError("axis length must be >= 1, got shape " +
                       shape_string(shape));
    }
    total *= extent;
  }
  return total;
}

void check_axis_list(const Tensor& t, const std::vector<std::size_t>& axes,
                     const char* what) {
  std::vector<bool> seen(t.rank(), false);
  for (std::size_t axis : axes) {
    if (axis >= t.rank()) {
      throw ShapeError(std::string(what) + ": axis " + std::to_string(axis) +
                       " out of range for shape " + shape_string(t.shape()));
    }
    if (seen[axis]) {
      throw ShapeError(std::string(what) + ": duplicate axis " +
                       std::to_string(axis));
    }
    seen[axis] = true;
  }
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(checked_product(shape_)) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<Complex> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (checked_product(shape_) != data_.size()) {
    throw ShapeError("data size " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
  return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("extent: axis " + std::to_string(axis) +
                     " out of range for shape " + shape_string(shape_));
  }
  return shape_[axis];
}

std::size_t Tensor::offset_of(
    std::initializer_list<std::size_t> indices) const {
  if (indices.size() != shape_.size()) {
    throw ShapeError("index rank " + std::to_string(indices.size()) +
                     " does not match tensor rank " +
                     std::to_string(shape_.size()));
  }
  std::size_t offset = 0;
  std::size_t axis = 0;
  for (std::size_t idx : indices) {
    if (idx >= shape_[axis]) {
      throw ShapeError("index " + std::to_string(idx) + " out of range on axis " +
                       std::to_string(axis) + " of shape " +
                       shape_string(shape_));
    }
    offset = offset * shape_[axis] + idx;
    ++axis;
  }
  return offset;
}

Complex& Tensor::at(std::initializer_list<std::size_t> indices) {
  return data_[offset_of(indices)];
}

const Complex& Tensor::at(std::initializer_list<std::size_t> indices) const {
  return data_[offset_of(indices)];
}

Tensor Tensor::reshaped(std::vector<std::size_t> new_shape) const {
  if (checked_product(new_shape) != data_.size()) {
    throw ShapeError("reshape from " + shape_string(shape_) + " to " +
                     shape_string(new_shape) + " changes the element count");
  }
  return Tensor(std::move(new_shape), data_);
}

Tensor Tensor::conjugate() const {
  Tensor out = *this;
  for (Complex& v : out.data_) v = std::conj(v);
  return out;
}

double Tensor::frobenius_norm() const {
  double sum = 0.0;
  for (const Complex& v : data_) sum += std::norm(v);
  return std::sqrt(sum);
}

Tensor& Tensor::operator*=(Complex factor) {
  for (Complex& v : data_) v *= factor;
  return *this;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (!same_shape(other)) {
    throw ShapeError("operator+=: shape " + shape_string(shape_) + " vs " +
                     shape_string(other.shape_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor Tensor::operator*(Complex factor) const {
  Tensor out = *this;
  out *= factor;
  return out;
}

Tensor permute_axes(const Tensor& a, const std::vector<std::size_t>& perm) {
  if (perm.size() != a.rank()) {
    throw ShapeError("permutation length " + std::to_string(perm.size()) +
                     " does not match rank " + std::to_string(a.rank()));
  }
  check_axis_list(a, perm, "permute_axes");

  bool is_identity = true;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    if (perm[j] != j) {
      is_identity = false;
      break;
    }
  }
  if (is_identity) return a;

  const std::size_t rank = a.rank();
  std::vector<std::size_t> in_strides(rank, 1);
  for (std::size_t axis = rank; axis-- > 1;) {
    in_strides[axis - 1] = in_strides[axis] * a.shape()[axis];
  }

  std::vector<std::size_t> out_shape(rank);
  std::vector<std::size_t> gather_stride(rank);
  for (std::size_t j = 0; j < rank; ++j) {
    out_shape[j] = a.shape()[perm[j]];
    gather_stride[j] = in_strides[perm[j]];
  }

  Tensor out(out_shape);
  std::vector<std::size_t> counter(rank, 0);
  const Complex* src = a.data();
  Complex* dst = out.data();
  std::size_t in_offset = 0;
  const std::size_t total = a.size();
  for (std::size_t linear = 0; linear < total; ++linear) {
    dst[linear] = src[in_offset];
    // advance the mixed-radix counter over the output shape
    for (std::size_t axis = rank; axis-- > 0;) {
      in_offset += gather_stride[axis];
      if (++counter[axis] < out_shape[axis]) break;
      in_offset -= gather_stride[axis] * out_shape[axis];
      counter[axis] = 0;
    }
  }
  return out;
}

Tensor contract(const Tensor& a, const std::vector<std::size_t>& axes_a,
                const Tensor& b, const std::vector<std::size_t>& axes_b) {
  if (axes_a.size() != axes_b.size()) {
    throw ShapeError("contract: axis lists of different length (" +
                     std::to_string(axes_a.size()) + " vs " +
                     std::to_string(axes_b.size()) + ")");
  }
  check_axis_list(a, axes_a, "contract(a)");
  check_axis_list(b, axes_b, "contract(b)");
  for (std::size_t k = 0; k < axes_a.size(); ++k) {
    if (a.shape()[axes_a[k]] != b.shape()[axes_b[k]]) {
      throw ShapeError("contract: paired axes " + std::to_string(axes_a[k]) +
                       "/" + std::to_string(axes_b[k]) +
                       " have different lengths; shapes " +
                       shape_string(a.shape()) + " and " +
                       shape_string(b.shape()));
    }
  }

  std::vector<bool> used_a(a.rank(), false), used_b(b.rank(), false);
  for (std::size_t axis : axes_a) used_a[axis] = true;
  for (std::size_t axis : axes_b) used_b[axis] = true;

  std::vector<std::size_t> perm_a, perm_b;
  std::vector<std::size_t> out_shape;
  std::size_t rows = 1, cols = 1, inner = 1;
  for (std::size_t axis = 0; axis < a.rank(); ++axis) {
    if (!used_a[axis]) {
      perm_a.push_back(axis);
      out_shape.push_back(a.shape()[axis]);
      rows *= a.shape()[axis];
    }
  }
  perm_a.insert(perm_a.end(), axes_a.begin(), axes_a.end());
  perm_b.assign(axes_b.begin(), axes_b.end());
  for (std::size_t axis = 0; axis < b.rank(); ++axis) {
    if (!used_b[axis]) {
      perm_b.push_back(axis);
      out_shape.push_back(b.shape()[axis]);
      cols *= b.shape()[axis];
    }
  }
  for (std::size_t axis : axes_a) inner *= a.shape()[axis];

  Tensor pa = permute_axes(a, perm_a);
  Tensor pb = permute_axes(b, perm_b);

  if (out_shape.empty()) out_shape.push_back(1);  // full contraction -> {1}
  Tensor out(out_shape);

  MapRowConst ma(pa.data(), static_cast<Eigen::Index>(rows),
                 static_cast<Eigen::Index>(inner));
  MapRowConst mb(pb.data(), static_cast<Eigen::Index>(inner),
                 static_cast<Eigen::Index>(cols));
  MapRow mo(out.data(), static_cast<Eigen::Index>(rows),
            static_cast<Eigen::Index>(cols));
  mo.noalias() = ma * mb;
  return out;
}

std::pair<Tensor, Tensor> split_orthonormal(
    const Tensor& a, const std::vector<std::size_t>& left_axes) {
  check_axis_list(a, left_axes, "split_orthonormal");
  if (left_axes.empty() || left_axes.size() == a.rank()) {
    throw ShapeError("split_orthonormal: axis split must be proper");
  }
  if (a.frobenius_norm() == 0.0) {
    throw NumericalError("split_orthonormal: zero tensor has no factorization");
  }

  std::vector<bool> used(a.rank(), false);
  for (std::size_t axis : left_axes) used[axis] = true;
  std::vector<std::size_t> perm(left_axes);
  std::vector<std::size_t> left_shape, rest_shape;
  for (std::size_t axis : left_axes) left_shape.push_back(a.shape()[axis]);
  for (std::size_t axis = 0; axis < a.rank(); ++axis) {
    if (!used[axis]) {
      perm.push_back(axis);
      rest_shape.push_back(a.shape()[axis]);
    }
  }
  Tensor grouped = permute_axes(a, perm);

  const std::size_t rows =
      std::accumulate(left_shape.begin(), left_shape.end(), std::size_t{1},
                      std::multiplies<>());
  const std::size_t cols = grouped.size() / rows;
  const std::size_t k = std::min(rows, cols);

  Eigen::MatrixXcd m(rows, cols);
  MapRowConst grouped_map(grouped.data(), static_cast<Eigen::Index>(rows),
                          static_cast<Eigen::Index>(cols));
  m = grouped_map;

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd thin_q =
      qr.householderQ() * Eigen::MatrixXcd::Identity(rows, k);
  Eigen::MatrixXcd r = qr.matrixQR()
                           .topRows(k)
                           .template triangularView<Eigen::Upper>();

  std::vector<std::size_t> q_shape = left_shape;
  q_shape.push_back(k);
  Tensor q(q_shape);
  MapRow(q.data(), static_cast<Eigen::Index>(rows),
         static_cast<Eigen::Index>(k)) = thin_q;

  std::vector<std::size_t> r_shape;
  r_shape.push_back(k);
  r_shape.insert(r_shape.end(), rest_shape.begin(), rest_shape.end());
  Tensor rt(r_shape);
  MapRow(rt.data(), static_cast<Eigen::Index>(k),
         static_cast<Eigen::Index>(cols)) = r;

  return {std::move(q), std::move(rt)};
}

EigenPairs hermitian_lowest(const Tensor& m, std::size_t count,
                            const EigenSolveOptions& options) {
  if (m.rank() != 2 || m.shape()[0] != m.shape()[1]) {
    throw ShapeError("hermitian_lowest: expected a square matrix, got shape " +
                     shape_string(m.shape()));
  }
  const std::size_t dim = m.shape()[0];
  if (count == 0 || count > dim) {
    throw ShapeError("hermitian_lowest: count " + std::to_string(count) +
                     " out of range for dimension " + std::to_string(dim));
  }

  MapRowConst mm(m.data(), static_cast<Eigen::Index>(dim),
                 static_cast<Eigen::Index>(dim));
  const double matrix_norm = mm.norm();
  const double herm_defect = (mm - mm.adjoint()).norm();
  if (herm_defect > options.hermiticity_tol * std::max(matrix_norm, 1e-300)) {
    throw NumericalError(
        "hermitian_lowest: matrix is not Hermitian (defect " +
        std::to_string(herm_defect) + ", norm " + std::to_string(matrix_norm) +
        ")");
  }

  EigenPairs result;
  result.vectors = Tensor({count, dim});

  if (dim <= options.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mm);
    if (solver.info() != Eigen::Success) {
      throw ConvergenceError("hermitian_lowest: dense eigensolver failed");
    }
    for (std::size_t k = 0; k < count; ++k) {
      result.values.push_back(solver.eigenvalues()(static_cast<Eigen::Index>(k)));
      Eigen::VectorXcd v = solver.eigenvectors().col(static_cast<Eigen::Index>(k));
      for (std::size_t i = 0; i < dim; ++i) {
        result.vectors.at({k, i}) = v(static_cast<Eigen::Index>(i));
      }
    }
    return result;
  }

  // Iterative path: Lanczos with deflation against already-found vectors.
  std::vector<Eigen::VectorXcd> found;
  RandomStream rng(0x5eedc0ffee123401ULL);
  for (std::size_t k = 0; k < count; ++k) {
    ApplyFn apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
      Eigen::VectorXcd x = in;
      for (const auto& v : found) x -= v * v.dot(x);
      out.noalias() = mm * x;
      for (const auto& v : found) out -= v * v.dot(out);
    };
    Eigen::VectorXcd start(dim);
    for (std::size_t i = 0; i < dim; ++i) start(i) = rng.complex_normal();
    for (const auto& v : found) start -= v * v.dot(start);
    start.normalize();

    LanczosOptions lopts;
    lopts.max_matvecs = options.max_iterations;
    lopts.rel_tol = options.residual_tol;
    LanczosOutcome outcome = lanczos_lowest(dim, apply, start, lopts);

    // Verify the contract residual against the true matrix norm.
    Eigen::VectorXcd residual = mm * outcome.vector - outcome.value * outcome.vector;
    if (!outcome.converged ||
        residual.norm() > options.residual_tol * std::max(matrix_norm, 1e-300)) {
      throw ConvergenceError(
          "hermitian_lowest: Lanczos did not converge after " +
          std::to_string(outcome.matvecs) + " matrix-vector products");
    }
    result.values.push_back(outcome.value);
    for (std::size_t i = 0; i < dim; ++i) {
      result.vectors.at({k, i}) = outcome.vector(static_cast<Eigen::Index>(i));
    }
    found.push_back(outcome.vector);
  }
  return result;
}

}  // namespace sepmps
