#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include <limits>

#include "tubal/parallel.hpp"
#include "tubal/spectral.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

// ---------------------------------------------------------------------------
// T-product and transpose
// ---------------------------------------------------------------------------

// Fourier-domain product: one matrix product per frontal slice.  Only the
// leading half of the slices is computed; the rest follows by conjugate
// symmetry, which both operands are assumed to carry (they do whenever they
// came from fft_mode3 of real tensors).
template <typename Scalar>
SpectralTensor3<Scalar> tprod(const SpectralTensor3<Scalar>& a,
                              const SpectralTensor3<Scalar>& b) {
  if (a.n2() != b.n1() || a.n3() != b.n3())
    throw ShapeError("tprod: inner dimensions must agree");
  SpectralTensor3<Scalar> c(a.n1(), b.n2(), a.n3());
  const Index h = spectral_half_count(a.n3());
  detail::parallel_for(h, [&](Index k) {
    c.slice(k).noalias() = a.slice(k) * b.slice(k);
  });
  conjugate_fill(c);
  return c;
}

template <typename Scalar>
Tensor3<Scalar> tprod(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b) {
  return ifft_mode3(tprod(fft_mode3(a), fft_mode3(b)));
}

// Tensor transpose: slice 0 is transposed in place, the remaining slices
// are transposed and reversed in order.
template <typename Scalar>
Tensor3<Scalar> transpose_t(const Tensor3<Scalar>& a) {
  Tensor3<Scalar> b(a.n2(), a.n1(), a.n3());
  b.slice(0) = a.slice(0).transpose();
  for (Index k = 1; k < a.n3(); ++k)
    b.slice(k) = a.slice(a.n3() - k).transpose();
  return b;
}

// In the Fourier domain the same operation is slice-wise: the reversal
// cancels against conjugation, leaving the conjugate transpose per slice.
template <typename Scalar>
SpectralTensor3<Scalar> transpose_t(const SpectralTensor3<Scalar>& a) {
  SpectralTensor3<Scalar> b(a.n2(), a.n1(), a.n3());
  for (Index k = 0; k < a.n3(); ++k) b.slice(k) = a.slice(k).adjoint();
  return b;
}

// Tube of frontal-slice traces of a square tensor.
template <typename Scalar>
Tube<Scalar> ttrace(const Tensor3<Scalar>& a) {
  if (a.n1() != a.n2()) throw ShapeError("ttrace: tensor must be square");
  Tube<Scalar> t(a.n3());
  for (Index k = 0; k < a.n3(); ++k) t(k) = a.slice(k).trace();
  return t;
}

// ---------------------------------------------------------------------------
// Tube algebra
// ---------------------------------------------------------------------------

// Tube product: circular convolution, i.e. coefficient-wise product of the
// Fourier coefficients.
template <typename Scalar>
Tube<Scalar> tube_mul(const Tube<Scalar>& a, const Tube<Scalar>& b) {
  if (a.n3() != b.n3()) throw ShapeError("tube_mul: length mismatch");
  return tube_ifft<Scalar>(tube_fft(a).cwiseProduct(tube_fft(b)));
}

// Tube inverse: coefficient-wise reciprocal in the Fourier domain.  A tube
// is invertible iff every Fourier coefficient is nonzero; tol <= 0 selects
// the default threshold n3 * eps * max|coefficient|.
template <typename Scalar>
Tube<Scalar> tube_inverse(const Tube<Scalar>& a, Scalar tol = Scalar(-1)) {
  const SpectralTube<Scalar> ahat = tube_fft(a);
  const Scalar scale = ahat.cwiseAbs().maxCoeff();
  const Scalar eff =
      tol > Scalar(0)
          ? tol
          : Scalar(a.n3()) * std::numeric_limits<Scalar>::epsilon() * scale;
  for (Index k = 0; k < a.n3(); ++k)
    if (std::abs(ahat(k)) <= eff)
      throw NotInvertibleError("tube_inverse: zero Fourier coefficient", k);
  return tube_ifft<Scalar>(ahat.cwiseInverse());
}

// Tube-times-tensor: scales Fourier slice k of b by coefficient k of a.
// Equals b * (a kron identity) under the T-product.
template <typename Scalar>
SpectralTensor3<Scalar> tube_times(const SpectralTube<Scalar>& ahat,
                                   const SpectralTensor3<Scalar>& b) {
  if (ahat.size() != b.n3()) throw ShapeError("tube_times: length mismatch");
  SpectralTensor3<Scalar> c(b.n1(), b.n2(), b.n3());
  for (Index k = 0; k < b.n3(); ++k) c.slice(k) = ahat(k) * b.slice(k);
  return c;
}

template <typename Scalar>
Tensor3<Scalar> tube_times(const Tube<Scalar>& a, const Tensor3<Scalar>& b) {
  if (a.n3() != b.n3()) throw ShapeError("tube_times: length mismatch");
  return ifft_mode3(tube_times<Scalar>(tube_fft(a), fft_mode3(b)));
}

// ---------------------------------------------------------------------------
// T-Kronecker product
// ---------------------------------------------------------------------------

// Slice-wise Kronecker product in the Fourier domain.
template <typename Scalar>
Tensor3<Scalar> tkron(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b) {
  if (a.n3() != b.n3()) throw ShapeError("tkron: length mismatch");
  const auto ahat = fft_mode3(a);
  const auto bhat = fft_mode3(b);
  SpectralTensor3<Scalar> chat(a.n1() * b.n1(), a.n2() * b.n2(), a.n3());
  const Index h = spectral_half_count(a.n3());
  detail::parallel_for(h, [&](Index k) {
    chat.slice(k) = Eigen::kroneckerProduct(ahat.slice(k), bhat.slice(k));
  });
  conjugate_fill(chat);
  return ifft_mode3(chat);
}

// ---------------------------------------------------------------------------
// Inner products and the diamond contraction
// ---------------------------------------------------------------------------

namespace detail {

// Fourier coefficients of the tubal inner product: per slice, the trace of
// (X slice)^H (Y slice).  The conjugate transpose (not the plain transpose)
// is what makes <Q, Q> come out as a real, nonnegative multiple of e.
template <typename Scalar>
SpectralTube<Scalar> spectral_inner(const SpectralTensor3<Scalar>& x,
                                    const SpectralTensor3<Scalar>& y) {
  SpectralTube<Scalar> t(x.n3());
  for (Index k = 0; k < x.n3(); ++k)
    t(k) = x.slice(k).conjugate().cwiseProduct(y.slice(k)).sum();
  return t;
}

template <typename Scalar>
Scalar spectral_frob(const SpectralTensor3<Scalar>& x) {
  Scalar sum = 0;
  for (Index k = 0; k < x.n3(); ++k) sum += x.slice(k).squaredNorm();
  return std::sqrt(sum / Scalar(x.n3()));
}

}  // namespace detail

// Tubal inner product <x, y> of equally shaped tensors.
template <typename Scalar>
Tube<Scalar> inner_t(const Tensor3<Scalar>& x, const Tensor3<Scalar>& y) {
  detail::require_same_shape(x, y, "inner_t");
  return tube_ifft<Scalar>(
      detail::spectral_inner(fft_mode3(x), fft_mode3(y)));
}

// Diamond contraction of two block rows: entry (i, j) of the result is the
// tubal inner product of the i-th width-s lateral block of a with the j-th
// width-s lateral block of b, i.e. the tubal matrix a^T * b when a and b
// are read as rows of lateral slices.  In the Fourier domain each slice is
// one p x l matrix of block-trace inner products, assembled as Va^H Vb
// with the blocks flattened into columns.
template <typename Scalar>
Tensor3<Scalar> tdiamond(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b,
                         Index s) {
  if (s <= 0 || a.n2() % s != 0 || b.n2() % s != 0)
    throw ShapeError("tdiamond: widths must be multiples of s");
  if (a.n1() != b.n1() || a.n3() != b.n3())
    throw ShapeError("tdiamond: operands must share height and depth");
  const Index p = a.n2() / s, l = b.n2() / s, n3 = a.n3();
  const auto ahat = fft_mode3(a);
  const auto bhat = fft_mode3(b);
  using CMatrix =
      Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  SpectralTensor3<Scalar> chat(p, l, n3);
  const Index h = spectral_half_count(n3);
  detail::parallel_for(h, [&](Index k) {
    CMatrix va(a.n1() * s, p), vb(b.n1() * s, l);
    for (Index i = 0; i < p; ++i)
      va.col(i) = ahat.slice(k).middleCols(i * s, s).reshaped();
    for (Index j = 0; j < l; ++j)
      vb.col(j) = bhat.slice(k).middleCols(j * s, s).reshaped();
    chat.slice(k) = va.adjoint() * vb;
  });
  conjugate_fill(chat);
  return ifft_mode3(chat);
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

template <typename Scalar>
Scalar frob_norm(const Tensor3<Scalar>& a) {
  return a.flat().norm();
}

// Frobenius norm evaluated in the Fourier domain (Parseval).
template <typename Scalar>
Scalar frob_norm(const SpectralTensor3<Scalar>& a) {
  return detail::spectral_frob(a);
}

// Tubal l2 norm of a single lateral column (m x 1 x n3): the root of the
// summed squared Fourier-slice norms, scaled by 1/sqrt(n3).  Agrees with
// frob_norm on its domain.
template <typename Scalar>
Scalar tl2_norm(const Tensor3<Scalar>& y) {
  if (y.n2() != 1) throw ShapeError("tl2_norm: expected an m x 1 x n3 tensor");
  return detail::spectral_frob(fft_mode3(y));
}

}  // namespace tubal
