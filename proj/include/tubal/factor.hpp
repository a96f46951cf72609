#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "tubal/ops.hpp"
#include "tubal/spectral.hpp"
#include "tubal/tensor.hpp"

namespace tubal {

namespace detail {

// Per-slice Frobenius norms of a spectrum; fails fast on the first slice
// below tol without modifying w, otherwise scales every slice to norm one.
template <typename Scalar>
struct SpectralNormalizeOutcome {
  Eigen::Vector<Scalar, Eigen::Dynamic> norms;
  Index bad_slice = -1;  // -1 on success
};

template <typename Scalar>
SpectralNormalizeOutcome<Scalar> spectral_normalize(SpectralTensor3<Scalar>& w,
                                                    Scalar tol) {
  SpectralNormalizeOutcome<Scalar> out;
  out.norms.resize(w.n3());
  for (Index k = 0; k < w.n3(); ++k) {
    out.norms(k) = w.slice(k).norm();
    if (!(out.norms(k) >= tol)) {
      out.bad_slice = k;
      return out;
    }
  }
  for (Index k = 0; k < w.n3(); ++k) w.slice(k) /= out.norms(k);
  return out;
}

// Spatial tube whose Fourier coefficients are the given real values.
template <typename Scalar>
Tube<Scalar> tube_from_real_spectrum(
    const Eigen::Vector<Scalar, Eigen::Dynamic>& coeffs) {
  SpectralTube<Scalar> c(coeffs.size());
  c.real() = coeffs;
  c.imag().setZero();
  return tube_ifft<Scalar>(c);
}

// Slice-wise Householder QR of the leading rows x cols block of each
// Fourier slice.  Full mode returns q rows x rows and r rows x cols;
// economy mode returns q rows x cols and r cols x cols.  Only the leading
// half of the slices is factorized, the rest is filled by conjugation
// (QR(conj(A)) = (conj(Q), conj(R)) for Householder reflections).
template <typename Scalar>
struct SpectralQRPair {
  SpectralTensor3<Scalar> q, r;
};

template <typename Scalar>
SpectralQRPair<Scalar> slicewise_qr(const SpectralTensor3<Scalar>& src,
                                    Index rows, Index cols, bool economy) {
  using CMatrix =
      Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
  if (rows > src.n1() || cols > src.n2() || rows <= 0 || cols <= 0)
    throw ShapeError("slicewise_qr: invalid block");
  if (economy && rows <= cols)
    throw ShapeError("slicewise_qr: economy mode needs a tall block");
  const Index n3 = src.n3();
  const Index qcols = economy ? cols : rows;
  SpectralQRPair<Scalar> out{SpectralTensor3<Scalar>(rows, qcols, n3),
                             SpectralTensor3<Scalar>(qcols, cols, n3)};
  const Index h = spectral_half_count(n3);
  parallel_for(h, [&](Index k) {
    const CMatrix block = src.slice(k).topLeftCorner(rows, cols);
    Eigen::HouseholderQR<CMatrix> qr(block);
    CMatrix thin = qr.householderQ() * CMatrix::Identity(rows, qcols);
    out.q.slice(k) = thin;
    out.r.slice(k) = qr.matrixQR()
                         .topRows(qcols)
                         .template triangularView<Eigen::Upper>();
  });
  conjugate_fill(out.q);
  conjugate_fill(out.r);
  return out;
}

// Tube-level back substitution on the Fourier coefficients: each slice is
// an independent complex upper-triangular solve.  Throws SingularError
// with the 0-based diagonal index when a pivot magnitude is at or below
// tol.  r is read only on and above the diagonal.
template <typename Scalar>
SpectralTensor3<Scalar> spectral_back_substitution(
    const SpectralTensor3<Scalar>& r, const SpectralTensor3<Scalar>& g,
    Scalar tol) {
  using Complex = std::complex<Scalar>;
  const Index m = r.n2(), n3 = r.n3();
  if (r.n1() < m || g.n1() != m || g.n3() != n3)
    throw ShapeError("spectral_back_substitution: shape mismatch");
  SpectralTensor3<Scalar> y(m, g.n2(), n3);
  const Index h = spectral_half_count(n3);
  for (Index k = 0; k < h; ++k) {
    for (Index c = 0; c < g.n2(); ++c) {
      for (Index i = m - 1; i >= 0; --i) {
        Complex acc = g(i, c, k);
        for (Index j = i + 1; j < m; ++j) acc -= r(i, j, k) * y(j, c, k);
        const Complex piv = r(i, i, k);
        if (std::abs(piv) <= tol)
          throw SingularError("back substitution: non-invertible diagonal tube",
                              i);
        y(i, c, k) = acc / piv;
      }
    }
  }
  conjugate_fill(y);
  return y;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

template <typename Scalar>
struct NormalizeResult {
  Tensor3<Scalar> q;  // same shape as the input, unit Fourier-slice norms
  Tube<Scalar> t;     // invertible tube with a = tube_times(t, q)
};

// Scales each Fourier slice of a to unit Frobenius norm.  The returned
// tube t holds the norms as its Fourier coefficients, so a == t "times" q
// and t is invertible by construction.  Throws BreakdownError with the
// offending slice index when some slice norm falls below tol (default:
// machine epsilon, so only an essentially zero slice breaks down).
template <typename Scalar>
NormalizeResult<Scalar> normalize(const Tensor3<Scalar>& a,
                                  Scalar tol = Scalar(-1)) {
  const Scalar eff =
      tol > Scalar(0) ? tol : std::numeric_limits<Scalar>::epsilon();
  SpectralTensor3<Scalar> ahat = fft_mode3(a);
  auto outcome = detail::spectral_normalize(ahat, eff);
  if (outcome.bad_slice >= 0)
    throw BreakdownError("normalize: Fourier slice norm below tolerance",
                         outcome.bad_slice);
  return {ifft_mode3(ahat), detail::tube_from_real_spectrum(outcome.norms)};
}

// ---------------------------------------------------------------------------
// Tubal-global QR
// ---------------------------------------------------------------------------

template <typename Scalar>
struct TubalQRResult {
  Tensor3<Scalar> q;      // n x (p*s) x n3, blocks orthonormal under tdiamond
  TubalMatrix<Scalar> r;  // p x p upper-triangular tubal matrix
};

// Modified Gram-Schmidt over width-s lateral blocks with tube-valued
// coefficients.  One re-orthogonalization pass runs whenever a projection
// removes more than 30% of a block's norm.  Throws RankDeficiencyError
// with the 0-based block index when normalization of a projected block
// breaks down (tol <= 0 selects 1e-12 relative to the largest Fourier
// slice norm of z).
template <typename Scalar>
TubalQRResult<Scalar> tubal_global_qr(const Tensor3<Scalar>& z, Index s,
                                      Scalar tol = Scalar(-1)) {
  if (s <= 0 || z.n2() % s != 0)
    throw ShapeError("tubal_global_qr: width must be a multiple of s");
  const Index p = z.n2() / s, n3 = z.n3();
  const SpectralTensor3<Scalar> zhat = fft_mode3(z);

  Scalar scale = 0;
  for (Index k = 0; k < n3; ++k)
    scale = std::max(scale, zhat.slice(k).norm());
  const Scalar eff = tol > Scalar(0) ? tol : Scalar(1e-12) * scale;

  std::vector<SpectralTensor3<Scalar>> qhat;
  qhat.reserve(p);
  SpectralTensor3<Scalar> rhat(p, p, n3);

  for (Index j = 0; j < p; ++j) {
    SpectralTensor3<Scalar> w = lateral_block(zhat, j, s);
    const Scalar pre = detail::spectral_frob(w);
    for (Index i = 0; i < j; ++i) {
      const SpectralTube<Scalar> rij = detail::spectral_inner(qhat[i], w);
      for (Index k = 0; k < n3; ++k) w.slice(k) -= rij(k) * qhat[i].slice(k);
      for (Index k = 0; k < n3; ++k) rhat(i, j, k) = rij(k);
    }
    if (j > 0 && detail::spectral_frob(w) < Scalar(0.7) * pre) {
      for (Index i = 0; i < j; ++i) {
        const SpectralTube<Scalar> c = detail::spectral_inner(qhat[i], w);
        for (Index k = 0; k < n3; ++k) w.slice(k) -= c(k) * qhat[i].slice(k);
        for (Index k = 0; k < n3; ++k) rhat(i, j, k) += c(k);
      }
    }
    auto outcome = detail::spectral_normalize(w, eff);
    if (outcome.bad_slice >= 0)
      throw RankDeficiencyError("tubal_global_qr: dependent block", j);
    for (Index k = 0; k < n3; ++k)
      rhat(j, j, k) = std::complex<Scalar>(outcome.norms(k), 0);
    qhat.push_back(std::move(w));
  }

  SpectralTensor3<Scalar> qall(z.n1(), p * s, n3);
  for (Index j = 0; j < p; ++j) set_lateral_block(qall, j, s, qhat[j]);
  return {ifft_mode3(qall), TubalMatrix<Scalar>(ifft_mode3(rhat))};
}

// ---------------------------------------------------------------------------
// Slice-wise T-QR
// ---------------------------------------------------------------------------

template <typename Scalar>
struct SliceQRResult {
  Tensor3<Scalar> q;
  Tensor3<Scalar> r;
};

// QR of every Fourier slice, inverse-transformed back: f == tprod(q, r),
// transpose_t(q) * q == identity.  Tall inputs (n1 > n2) get the economy
// factorization (q: n1 x n2, r: n2 x n2); otherwise q is n1 x n1 square.
template <typename Scalar>
SliceQRResult<Scalar> tqr_slicewise(const Tensor3<Scalar>& f) {
  const bool economy = f.n1() > f.n2();
  auto pair = detail::slicewise_qr(fft_mode3(f), f.n1(), f.n2(), economy);
  return {ifft_mode3(pair.q), ifft_mode3(pair.r)};
}

// ---------------------------------------------------------------------------
// Tubal back substitution
// ---------------------------------------------------------------------------

// Solves r * y = g for an upper-triangular tubal matrix r by tube-level
// back substitution (coefficient-wise in the Fourier domain).  tol <= 0
// selects n3 * eps * (largest diagonal coefficient magnitude), mirroring
// tube_inverse.  Throws SingularError with the diagonal index whose tube
// is not invertible at that threshold, and ShapeError when r is not
// square/upper-triangular (sub-diagonal entries above 1e-12 relative).
template <typename Scalar>
TubalMatrix<Scalar> tubal_back_substitution(const TubalMatrix<Scalar>& r,
                                            const TubalMatrix<Scalar>& g,
                                            Scalar tol = Scalar(-1)) {
  if (r.rows() != r.cols() || g.rows() != r.rows() || g.n3() != r.n3())
    throw ShapeError("tubal_back_substitution: shape mismatch");
  const Scalar mag = r.tensor().flat().cwiseAbs().maxCoeff();
  if (!r.is_upper_triangular(Scalar(1e-12) * mag))
    throw ShapeError("tubal_back_substitution: r is not upper triangular");

  const SpectralTensor3<Scalar> rhat = fft_mode3(r.tensor());
  const SpectralTensor3<Scalar> ghat = fft_mode3(g.tensor());
  Scalar diag_scale = 0;
  for (Index k = 0; k < r.n3(); ++k)
    for (Index i = 0; i < r.rows(); ++i)
      diag_scale = std::max(diag_scale, std::abs(rhat(i, i, k)));
  const Scalar eff = tol > Scalar(0)
                         ? tol
                         : Scalar(r.n3()) *
                               std::numeric_limits<Scalar>::epsilon() *
                               diag_scale;
  return TubalMatrix<Scalar>(
      ifft_mode3(detail::spectral_back_substitution(rhat, ghat, eff)));
}

}  // namespace tubal
