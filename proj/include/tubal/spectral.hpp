#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "tubal/parallel.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

template <typename Scalar>
using SpectralTube = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>;

// Complex companion of Tensor3 holding mode-3 Fourier coefficients, same
// slice-major / row-major-in-slice layout.
template <typename Scalar_>
class SpectralTensor3 {
 public:
  using Scalar = Scalar_;
  using Complex = std::complex<Scalar>;
  using SliceMatrix =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using SliceRef = Eigen::Map<SliceMatrix>;
  using SliceCRef = Eigen::Map<const SliceMatrix>;

  SpectralTensor3() = default;

  SpectralTensor3(Index n1, Index n2, Index n3) : n1_(n1), n2_(n2), n3_(n3) {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0)
      throw ShapeError("SpectralTensor3: dimensions must be positive");
    data_.assign(static_cast<std::size_t>(n1 * n2 * n3), Complex(0));
  }

  Index n1() const { return n1_; }
  Index n2() const { return n2_; }
  Index n3() const { return n3_; }
  Index size() const { return n1_ * n2_ * n3_; }

  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

  Complex& operator()(Index i, Index j, Index k) {
    return data_[static_cast<std::size_t>((k * n1_ + i) * n2_ + j)];
  }
  Complex operator()(Index i, Index j, Index k) const {
    return data_[static_cast<std::size_t>((k * n1_ + i) * n2_ + j)];
  }

  SliceRef slice(Index k) {
    return SliceRef(data_.data() + k * n1_ * n2_, n1_, n2_);
  }
  SliceCRef slice(Index k) const {
    return SliceCRef(data_.data() + k * n1_ * n2_, n1_, n2_);
  }

  bool same_shape(const SpectralTensor3& o) const {
    return n1_ == o.n1_ && n2_ == o.n2_ && n3_ == o.n3_;
  }

 private:
  Index n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<Complex> data_;
};

using SpectralTensor3d = SpectralTensor3<double>;

// DFT matrix F with F(j,k) = w^(j*k), w = exp(-2*pi*i/n).  F is symmetric,
// F^H F = n I, and F^(-1) = conj(F)/n.  Entries whose angle is a multiple
// of pi/2 are built exactly (1, -1, i, -i), so the coefficients that must
// come out real for a real input (k = 0 and, for even n, k = n/2) carry an
// exactly zero imaginary part.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> dft_matrix(
    Index n) {
  using Complex = std::complex<Scalar>;
  if (n <= 0) throw ShapeError("dft_matrix: order must be positive");
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> f(n, n);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  for (Index j = 0; j < n; ++j) {
    for (Index k = j; k < n; ++k) {
      const Index m = (j * k) % n;
      Complex v;
      if (m == 0)
        v = Complex(1, 0);
      else if (2 * m == n)
        v = Complex(-1, 0);
      else if (4 * m == n)
        v = Complex(0, -1);
      else if (4 * m == 3 * n)
        v = Complex(0, 1);
      else
        v = std::polar(Scalar(1), -two_pi * Scalar(m) / Scalar(n));
      f(j, k) = v;
      f(k, j) = v;
    }
  }
  return f;
}

// Fourier slices [h, n3) of a real tensor repeat earlier ones conjugated;
// h is the number of leading slices that must actually be computed.
inline Index spectral_half_count(Index n3) { return n3 / 2 + 1; }

// Overwrites slices [h, n3) with the conjugates of their partners
// (slice k = conj(slice n3-k)).  For even n3 the self-paired middle slice
// must already be real up to 1e-12 relative to its magnitude; its residual
// imaginary part is cleared so the symmetry holds exactly.
template <typename Scalar>
void conjugate_fill(SpectralTensor3<Scalar>& s) {
  const Index n3 = s.n3();
  if (n3 % 2 == 0 && n3 > 1) {
    auto mid = s.slice(n3 / 2);
    const Scalar scale = mid.cwiseAbs().maxCoeff();
    const Scalar residue = mid.imag().cwiseAbs().maxCoeff();
    if (residue > Scalar(1e-12) * scale)
      throw ConsistencyError(
          "conjugate_fill: self-paired middle slice is not real");
    mid.imag().setZero();
  }
  for (Index k = spectral_half_count(n3); k < n3; ++k)
    s.slice(k) = s.slice(n3 - k).conjugate();
}

namespace detail {

// The flat buffer seen as an (n1*n2) x n3 column-major matrix: column k is
// frontal slice k, so a mode-3 transform is one right-multiplication by F.
template <typename Scalar>
using TubeMajorMap =
    Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;

}  // namespace detail

template <typename Scalar>
SpectralTensor3<Scalar> fft_mode3(const Tensor3<Scalar>& t) {
  using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index nn = t.n1() * t.n2(), n3 = t.n3();
  SpectralTensor3<Scalar> out(t.n1(), t.n2(), t.n3());
  const auto f = dft_matrix<Scalar>(n3);
  detail::TubeMajorMap<Scalar> x(t.data(), nn, n3);
  const RealMatrix re = x * f.real();
  const RealMatrix im = x * f.imag();
  Eigen::Map<Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>>
      y(out.data(), nn, n3);
  y.real() = re;
  y.imag() = im;
  return out;
}

// Inverse mode-3 transform of a spectrum that must describe a real tensor.
// Throws SymmetryError when conjugate symmetry is violated beyond 1e-10
// relative to the largest coefficient, and ConsistencyError when the
// inverse still leaves more than 1e-10 relative imaginary residue.
template <typename Scalar>
Tensor3<Scalar> ifft_mode3(const SpectralTensor3<Scalar>& s) {
  using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index nn = s.n1() * s.n2(), n3 = s.n3();

  Scalar scale = 0, asym = 0;
  for (Index k = 0; k < n3; ++k)
    scale = std::max(scale, s.slice(k).cwiseAbs().maxCoeff());
  for (Index k = 0; k <= n3 / 2; ++k) {
    const Index partner = (n3 - k) % n3;
    asym = std::max(
        asym,
        (s.slice(k) - s.slice(partner).conjugate()).cwiseAbs().maxCoeff());
  }
  if (asym > Scalar(1e-10) * scale)
    throw SymmetryError("ifft_mode3: spectrum is not conjugate symmetric");

  const auto f = dft_matrix<Scalar>(n3);
  detail::TubeMajorMap<std::complex<Scalar>> y(s.data(), nn, n3);
  const RealMatrix yre = y.real();
  const RealMatrix yim = y.imag();
  const Scalar inv = Scalar(1) / Scalar(n3);
  Tensor3<Scalar> out(s.n1(), s.n2(), s.n3());
  Eigen::Map<RealMatrix> z(out.data(), nn, n3);
  z = (yre * f.real() + yim * f.imag()) * inv;
  // The residue is rounding noise on the scale of the input spectrum, so
  // it is measured against ||y||, not against the (possibly tiny) result.
  const RealMatrix zim = (yim * f.real() - yre * f.imag()) * inv;
  if (zim.norm() > Scalar(1e-10) * inv * y.norm())
    throw ConsistencyError("ifft_mode3: imaginary residue after inverse");
  return out;
}

template <typename Scalar>
SpectralTube<Scalar> tube_fft(const Tube<Scalar>& t) {
  return dft_matrix<Scalar>(t.n3()) * t.vec().template cast<std::complex<Scalar>>();
}

template <typename Scalar>
Tube<Scalar> tube_ifft(const SpectralTube<Scalar>& coeffs) {
  SpectralTensor3<Scalar> s(1, 1, coeffs.size());
  for (Index k = 0; k < coeffs.size(); ++k) s(0, 0, k) = coeffs(k);
  return Tube<Scalar>::from_tensor(ifft_mode3(s));
}

// Lateral blocks on spectra, mirroring the dense versions.
template <typename Scalar>
SpectralTensor3<Scalar> lateral_block(const SpectralTensor3<Scalar>& t, Index j,
                                      Index s) {
  if (s <= 0 || (j + 1) * s > t.n2())
    throw ShapeError("lateral_block: block out of range");
  SpectralTensor3<Scalar> out(t.n1(), s, t.n3());
  for (Index k = 0; k < t.n3(); ++k)
    out.slice(k) = t.slice(k).middleCols(j * s, s);
  return out;
}

template <typename Scalar>
void set_lateral_block(SpectralTensor3<Scalar>& t, Index j, Index s,
                       const SpectralTensor3<Scalar>& block) {
  if (block.n1() != t.n1() || block.n2() != s || block.n3() != t.n3() ||
      (j + 1) * s > t.n2())
    throw ShapeError("set_lateral_block: block out of range");
  for (Index k = 0; k < t.n3(); ++k)
    t.slice(k).middleCols(j * s, s) = block.slice(k);
}

}  // namespace tubal
