#pragma once

#include "tubal/tensor.hpp"

namespace tubal {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Stacks the frontal slices vertically into an (n1*n3) x n2 matrix.
template <typename Scalar>
DenseMatrix<Scalar> unfold(const Tensor3<Scalar>& a) {
  DenseMatrix<Scalar> m(a.n1() * a.n3(), a.n2());
  for (Index k = 0; k < a.n3(); ++k)
    m.middleRows(k * a.n1(), a.n1()) = a.slice(k);
  return m;
}

// Inverse of unfold: splits an (n1*n3) x n2 matrix back into n3 slices.
template <typename Scalar>
Tensor3<Scalar> fold(const DenseMatrix<Scalar>& m, Index n3) {
  if (n3 <= 0 || m.rows() % n3 != 0)
    throw ShapeError("fold: row count must be a multiple of n3");
  const Index n1 = m.rows() / n3;
  Tensor3<Scalar> a(n1, m.cols(), n3);
  for (Index k = 0; k < n3; ++k)
    a.slice(k) = m.middleRows(k * n1, n1);
  return a;
}

// Block-circulant matrix of a tensor: block (i, j) is frontal slice
// (i - j) mod n3, so column block 0 is the unfolding and each further
// column block is circularly shifted down by one.
template <typename Scalar>
DenseMatrix<Scalar> bcirc(const Tensor3<Scalar>& a) {
  const Index n1 = a.n1(), n2 = a.n2(), n3 = a.n3();
  DenseMatrix<Scalar> m(n1 * n3, n2 * n3);
  for (Index j = 0; j < n3; ++j)
    for (Index i = 0; i < n3; ++i)
      m.block(i * n1, j * n2, n1, n2) = a.slice(((i - j) % n3 + n3) % n3);
  return m;
}

}  // namespace tubal
