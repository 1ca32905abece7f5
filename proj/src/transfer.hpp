#pragma once

// Transfer-matrix steps shared by the MPS and solver translation units.
// Environment matrices are indexed [bra, ket] throughout.

#include <Eigen/Dense>

#include "sepmps/tensor.hpp"

namespace sepmps::detail {

using RowMat =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const RowMat> map2(const Tensor& t, std::size_t rows,
                                     std::size_t cols) {
  return {t.data(), static_cast<Eigen::Index>(rows),
          static_cast<Eigen::Index>(cols)};
}

inline Eigen::Map<const RowMat> op_map(const Tensor& op) {
  return map2(op, op.shape()[0], op.shape()[1]);
}

// Absorb one site moving right: E at the left boundary of `bra`/`ket`
// becomes the environment at their right boundary, with an optional local
// operator O inserted: E'[rb,ra] = conj(B[lb,s',rb]) O[s',s] E[lb,la] A[la,s,ra].
inline Eigen::MatrixXcd step_left(const Eigen::MatrixXcd& env,
                                  const Tensor& bra, const Tensor& ket,
                                  const Tensor* op) {
  const std::size_t bl = bra.shape()[0], d = bra.shape()[1], br = bra.shape()[2];
  const std::size_t al = ket.shape()[0], ar = ket.shape()[2];

  RowMat g = env * map2(ket, al, d * ar);  // (bl, d*ar)
  if (op) {
    auto o = op_map(*op);
    RowMat mixed(bl * d, ar);
    for (std::size_t l = 0; l < bl; ++l) {
      mixed.middleRows(l * d, d).noalias() =
          o * Eigen::Map<const RowMat>(g.data() + l * d * ar, d, ar);
    }
    g = Eigen::Map<const RowMat>(mixed.data(), bl, d * ar);
  }
  Eigen::Map<const RowMat> gm(g.data(), bl * d, ar);
  return map2(bra, bl * d, br).adjoint() * gm;  // (br, ar)
}

// Absorb one site moving left: E at the right boundary becomes the
// environment at the left boundary.
inline Eigen::MatrixXcd step_right(const Eigen::MatrixXcd& env,
                                   const Tensor& bra, const Tensor& ket,
                                   const Tensor* op) {
  const std::size_t bl = bra.shape()[0], d = bra.shape()[1], br = bra.shape()[2];
  const std::size_t al = ket.shape()[0], ar = ket.shape()[2];

  RowMat g = map2(ket, al * d, ar) * env.transpose();  // ((la,s), rb)
  if (op) {
    auto o = op_map(*op);
    RowMat mixed(al * d, br);
    for (std::size_t l = 0; l < al; ++l) {
      mixed.middleRows(l * d, d).noalias() =
          o * Eigen::Map<const RowMat>(g.data() + l * d * br, d, br);
    }
    g.swap(mixed);
  }
  // E'[lb,la] = sum_x conj(B[lb,x]) G[la,x] over x = (s', rb)
  Eigen::Map<const RowMat> gm(g.data(), al, d * br);
  return map2(bra, bl, d * br).conjugate() * gm.transpose();  // (bl, al)
}

}  // namespace sepmps::detail
