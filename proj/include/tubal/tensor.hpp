#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "tubal/errors.hpp"

namespace tubal {

using Index = Eigen::Index;

// Order-3 tensor of shape n1 x n2 x n3 over a real scalar.  Storage is a
// single flat buffer: frontal slice k occupies the k-th block of n1*n2
// values, row-major within the slice.  This matches the TNS3 payload
// byte-for-byte, so file I/O is a plain buffer copy.
template <typename Scalar_>
class Tensor3 {
 public:
  using Scalar = Scalar_;
  using SliceMatrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using SliceRef = Eigen::Map<SliceMatrix>;
  using SliceCRef = Eigen::Map<const SliceMatrix>;

  Tensor3() = default;

  Tensor3(Index n1, Index n2, Index n3) : n1_(n1), n2_(n2), n3_(n3) {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0)
      throw ShapeError("Tensor3: dimensions must be positive");
    data_.assign(static_cast<std::size_t>(n1 * n2 * n3), Scalar(0));
  }

  // Identity under the T-product: first frontal slice is I, the rest zero.
  static Tensor3 identity(Index n, Index n3) {
    Tensor3 t(n, n, n3);
    t.slice(0).setIdentity();
    return t;
  }

  Index n1() const { return n1_; }
  Index n2() const { return n2_; }
  Index n3() const { return n3_; }
  Index size() const { return n1_ * n2_ * n3_; }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  Scalar& operator()(Index i, Index j, Index k) {
    return data_[static_cast<std::size_t>((k * n1_ + i) * n2_ + j)];
  }
  Scalar operator()(Index i, Index j, Index k) const {
    return data_[static_cast<std::size_t>((k * n1_ + i) * n2_ + j)];
  }

  SliceRef slice(Index k) {
    return SliceRef(data_.data() + k * n1_ * n2_, n1_, n2_);
  }
  SliceCRef slice(Index k) const {
    return SliceCRef(data_.data() + k * n1_ * n2_, n1_, n2_);
  }

  Eigen::Map<Eigen::Vector<Scalar, Eigen::Dynamic>> flat() {
    return {data_.data(), size()};
  }
  Eigen::Map<const Eigen::Vector<Scalar, Eigen::Dynamic>> flat() const {
    return {data_.data(), size()};
  }

  void setZero() { flat().setZero(); }

  bool same_shape(const Tensor3& o) const {
    return n1_ == o.n1_ && n2_ == o.n2_ && n3_ == o.n3_;
  }

  bool all_finite() const { return flat().allFinite(); }

 private:
  Index n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<Scalar> data_;
};

using Tensor3d = Tensor3<double>;

namespace detail {

template <typename Scalar>
void require_same_shape(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b,
                        const char* who) {
  if (!a.same_shape(b)) throw ShapeError(std::string(who) + ": shape mismatch");
}

}  // namespace detail

template <typename Scalar>
Tensor3<Scalar> operator+(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b) {
  detail::require_same_shape(a, b, "operator+");
  Tensor3<Scalar> out(a.n1(), a.n2(), a.n3());
  out.flat() = a.flat() + b.flat();
  return out;
}

template <typename Scalar>
Tensor3<Scalar> operator-(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b) {
  detail::require_same_shape(a, b, "operator-");
  Tensor3<Scalar> out(a.n1(), a.n2(), a.n3());
  out.flat() = a.flat() - b.flat();
  return out;
}

template <typename Scalar>
Tensor3<Scalar> operator*(Scalar c, const Tensor3<Scalar>& a) {
  Tensor3<Scalar> out(a.n1(), a.n2(), a.n3());
  out.flat() = c * a.flat();
  return out;
}

// A 1 x 1 x n3 tensor viewed as a plain coefficient vector.
template <typename Scalar_>
class Tube {
 public:
  using Scalar = Scalar_;
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

  Tube() = default;

  explicit Tube(Index n3) {
    if (n3 <= 0) throw ShapeError("Tube: length must be positive");
    data_ = Vector::Zero(n3);
  }

  explicit Tube(Vector coeffs) : data_(std::move(coeffs)) {
    if (data_.size() == 0) throw ShapeError("Tube: length must be positive");
  }

  // Multiplicative identity e = (1, 0, ..., 0).
  static Tube unit(Index n3) {
    Tube e(n3);
    e.data_(0) = Scalar(1);
    return e;
  }

  static Tube zero(Index n3) { return Tube(n3); }

  Index n3() const { return data_.size(); }
  Scalar& operator()(Index k) { return data_(k); }
  Scalar operator()(Index k) const { return data_(k); }

  Vector& vec() { return data_; }
  const Vector& vec() const { return data_; }

  Tensor3<Scalar> as_tensor() const {
    Tensor3<Scalar> t(1, 1, n3());
    for (Index k = 0; k < n3(); ++k) t(0, 0, k) = data_(k);
    return t;
  }

  static Tube from_tensor(const Tensor3<Scalar>& t) {
    if (t.n1() != 1 || t.n2() != 1)
      throw ShapeError("Tube::from_tensor: expected a 1 x 1 x n3 tensor");
    Tube out(t.n3());
    for (Index k = 0; k < t.n3(); ++k) out.data_(k) = t(0, 0, k);
    return out;
  }

 private:
  Vector data_;
};

using Tubed = Tube<double>;

// A p x q grid of tubes, stored as the equivalent p x q x n3 tensor.  Used
// for the small projected objects the iterative methods build (Hessenberg
// and bidiagonal couplings, triangular factors, coefficient columns).
template <typename Scalar_>
class TubalMatrix {
 public:
  using Scalar = Scalar_;

  TubalMatrix() = default;
  TubalMatrix(Index rows, Index cols, Index n3) : data_(rows, cols, n3) {}
  explicit TubalMatrix(Tensor3<Scalar> data) : data_(std::move(data)) {}

  static TubalMatrix identity(Index n, Index n3) {
    return TubalMatrix(Tensor3<Scalar>::identity(n, n3));
  }

  Index rows() const { return data_.n1(); }
  Index cols() const { return data_.n2(); }
  Index n3() const { return data_.n3(); }

  Tube<Scalar> tube(Index i, Index j) const {
    Tube<Scalar> t(n3());
    for (Index k = 0; k < n3(); ++k) t(k) = data_(i, j, k);
    return t;
  }

  void set_tube(Index i, Index j, const Tube<Scalar>& t) {
    if (t.n3() != n3()) throw ShapeError("TubalMatrix::set_tube: length mismatch");
    for (Index k = 0; k < n3(); ++k) data_(i, j, k) = t(k);
  }

  Tensor3<Scalar>& tensor() { return data_; }
  const Tensor3<Scalar>& tensor() const { return data_; }

  // Entry-wise tests on every frontal slice.
  bool is_upper_triangular(Scalar tol = Scalar(0)) const {
    for (Index k = 0; k < n3(); ++k)
      for (Index i = 1; i < rows(); ++i)
        for (Index j = 0; j < std::min(i, cols()); ++j)
          if (std::abs(data_(i, j, k)) > tol) return false;
    return true;
  }

  bool is_upper_hessenberg(Scalar tol = Scalar(0)) const {
    for (Index k = 0; k < n3(); ++k)
      for (Index i = 2; i < rows(); ++i)
        for (Index j = 0; j < std::min(i - 1, cols()); ++j)
          if (std::abs(data_(i, j, k)) > tol) return false;
    return true;
  }

 private:
  Tensor3<Scalar> data_;
};

using TubalMatrixd = TubalMatrix<double>;

// Lateral block j of width s: columns [j*s, (j+1)*s).
template <typename Scalar>
Tensor3<Scalar> lateral_block(const Tensor3<Scalar>& t, Index j, Index s) {
  if (s <= 0 || (j + 1) * s > t.n2())
    throw ShapeError("lateral_block: block out of range");
  Tensor3<Scalar> out(t.n1(), s, t.n3());
  for (Index k = 0; k < t.n3(); ++k)
    out.slice(k) = t.slice(k).middleCols(j * s, s);
  return out;
}

template <typename Scalar>
void set_lateral_block(Tensor3<Scalar>& t, Index j, Index s,
                       const Tensor3<Scalar>& block) {
  if (block.n1() != t.n1() || block.n2() != s || block.n3() != t.n3() ||
      (j + 1) * s > t.n2())
    throw ShapeError("set_lateral_block: block out of range");
  for (Index k = 0; k < t.n3(); ++k)
    t.slice(k).middleCols(j * s, s) = block.slice(k);
}

// Side-by-side concatenation [a b].
template <typename Scalar>
Tensor3<Scalar> hconcat(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b) {
  if (a.n1() != b.n1() || a.n3() != b.n3())
    throw ShapeError("hconcat: incompatible shapes");
  Tensor3<Scalar> out(a.n1(), a.n2() + b.n2(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) {
    out.slice(k).leftCols(a.n2()) = a.slice(k);
    out.slice(k).rightCols(b.n2()) = b.slice(k);
  }
  return out;
}

// Stacked concatenation [a; b].
template <typename Scalar>
Tensor3<Scalar> vconcat(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b) {
  if (a.n2() != b.n2() || a.n3() != b.n3())
    throw ShapeError("vconcat: incompatible shapes");
  Tensor3<Scalar> out(a.n1() + b.n1(), a.n2(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) {
    out.slice(k).topRows(a.n1()) = a.slice(k);
    out.slice(k).bottomRows(b.n1()) = b.slice(k);
  }
  return out;
}

}  // namespace tubal
