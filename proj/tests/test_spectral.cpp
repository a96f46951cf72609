#include <gtest/gtest.h>

#include <complex>

#include "oracles.hpp"
#include "tubal/tubal.hpp"

using tubal::Index;
using tubal::SpectralTensor3d;
using tubal::Tensor3d;
using tubal::Tubed;

namespace {

double spectral_gap(const SpectralTensor3d& a, const SpectralTensor3d& b) {
  double mx = 0;
  for (Index k = 0; k < a.n3(); ++k)
    mx = std::max(mx, (a.slice(k) - b.slice(k)).cwiseAbs().maxCoeff());
  return mx;
}

}  // namespace

TEST(DftMatrix, MatchesDirectAngleFormula) {
  for (Index n : {1, 2, 3, 4, 5, 8, 12}) {
    const auto f = tubal::dft_matrix<double>(n);
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) {
        const auto want =
            std::polar(1.0, -2.0 * std::numbers::pi * double(j) * double(k) /
                                double(n));
        EXPECT_NEAR(std::abs(f(j, k) - want), 0.0, 1e-12)
            << "n=" << n << " (" << j << "," << k << ")";
      }
  }
}

TEST(DftMatrix, QuarterTurnEntriesAreExact) {
  const auto f4 = tubal::dft_matrix<double>(4);
  EXPECT_EQ(f4(0, 0), std::complex<double>(1, 0));
  EXPECT_EQ(f4(1, 1), std::complex<double>(0, -1));
  EXPECT_EQ(f4(1, 2), std::complex<double>(-1, 0));
  EXPECT_EQ(f4(1, 3), std::complex<double>(0, 1));
  EXPECT_EQ(f4(2, 2), std::complex<double>(1, 0));

  const auto f6 = tubal::dft_matrix<double>(6);
  EXPECT_EQ(f6(1, 3), std::complex<double>(-1, 0));
  EXPECT_EQ(f6(3, 4), std::complex<double>(1, 0));
}

TEST(DftMatrix, SymmetricAndUnitaryUpToScale) {
  for (Index n : {2, 3, 5, 6}) {
    const auto f = tubal::dft_matrix<double>(n);
    EXPECT_EQ(f, f.transpose().eval());
    const auto gram = (f.adjoint() * f).eval();
    EXPECT_NEAR((gram - double(n) * Eigen::MatrixXcd::Identity(n, n)).norm(),
                0.0, 1e-12 * n);
  }
}

TEST(FftMode3, MatchesDirectSummation) {
  const Tensor3d t = oracle::random_tensor(3, 2, 5, 101);
  const SpectralTensor3d fast = tubal::fft_mode3(t);
  const SpectralTensor3d slow = oracle::naive_fft(t);
  EXPECT_LT(spectral_gap(fast, slow), 1e-10);
}

TEST(FftMode3, IdentityTensorHasIdentitySpectrum) {
  const SpectralTensor3d s = tubal::fft_mode3(Tensor3d::identity(3, 4));
  for (Index k = 0; k < 4; ++k) {
    EXPECT_TRUE(s.slice(k).real().isIdentity(0.0)) << "slice " << k;
    EXPECT_EQ(s.slice(k).imag().cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(FftMode3, DepthOneIsIdentityMap) {
  const Tensor3d t = oracle::random_tensor(4, 3, 1, 102);
  const SpectralTensor3d s = tubal::fft_mode3(t);
  EXPECT_EQ(s.slice(0).real(), t.slice(0));
  EXPECT_EQ(s.slice(0).imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(FftMode3, SelfPairedSlicesAreExactlyReal) {
  // Columns 0 and n3/2 of the transform matrix hold exact +-1 entries, so
  // those coefficients of a real tensor must come out with zero imaginary
  // part bit for bit.
  const Tensor3d t = oracle::random_tensor(3, 3, 6, 103);
  const SpectralTensor3d s = tubal::fft_mode3(t);
  EXPECT_EQ(s.slice(0).imag().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.slice(3).imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(FftMode3, ConjugatePairsMatchToRounding) {
  // Paired slices are conjugates only mathematically; the trig evaluations
  // differ in the last bits, so this is a tolerance check by design.
  for (Index n3 : {4, 5, 7, 8}) {
    const Tensor3d t = oracle::random_tensor(4, 2, n3, 104 + n3);
    const SpectralTensor3d s = tubal::fft_mode3(t);
    double scale = 0;
    for (Index k = 0; k < n3; ++k)
      scale = std::max(scale, s.slice(k).cwiseAbs().maxCoeff());
    for (Index k = 1; k < n3; ++k) {
      const double gap =
          (s.slice(k) - s.slice(n3 - k).conjugate()).cwiseAbs().maxCoeff();
      EXPECT_LT(gap, 1e-12 * scale) << "n3=" << n3 << " k=" << k;
    }
  }
}

TEST(IfftMode3, InvertsForward) {
  for (Index n3 : {1, 2, 3, 4, 5, 8}) {
    const Tensor3d t = oracle::random_tensor(3, 2, n3, 110 + n3);
    const Tensor3d back = tubal::ifft_mode3(tubal::fft_mode3(t));
    EXPECT_LT((back - t).flat().cwiseAbs().maxCoeff(), 1e-12) << "n3=" << n3;
  }
}

TEST(IfftMode3, MatchesDirectSummation) {
  const Tensor3d t = oracle::random_tensor(2, 3, 4, 120);
  const SpectralTensor3d s = tubal::fft_mode3(t);
  const Tensor3d direct = oracle::naive_ifft(s);
  const Tensor3d fast = tubal::ifft_mode3(s);
  EXPECT_LT((fast - direct).flat().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IfftMode3, RejectsAsymmetricSpectrum) {
  const Tensor3d t = oracle::random_tensor(2, 2, 4, 121);
  SpectralTensor3d s = tubal::fft_mode3(t);
  s(0, 0, 1) += std::complex<double>(0.5, 0.5);  // breaks the pairing with slice 3
  EXPECT_THROW(tubal::ifft_mode3(s), tubal::SymmetryError);
}

TEST(ConjugateFill, ReconstructsUpperSlices) {
  const Tensor3d t = oracle::random_tensor(3, 2, 5, 130);
  const SpectralTensor3d full = tubal::fft_mode3(t);
  SpectralTensor3d half = full;
  for (Index k = tubal::spectral_half_count(5); k < 5; ++k)
    half.slice(k).setZero();
  tubal::conjugate_fill(half);
  for (Index k = 0; k < 5; ++k) {
    const double gap = (half.slice(k) - full.slice(k)).cwiseAbs().maxCoeff();
    EXPECT_LT(gap, 1e-12) << "slice " << k;
  }
  // After the fill the pairing holds exactly, not just to rounding.
  for (Index k = 3; k < 5; ++k)
    EXPECT_EQ((half.slice(k) - half.slice(5 - k).conjugate())
                  .cwiseAbs()
                  .maxCoeff(),
              0.0);
}

TEST(ConjugateFill, RejectsComplexMiddleSlice) {
  SpectralTensor3d s(2, 2, 4);
  s(0, 0, 0) = 1.0;
  s(0, 0, 2) = std::complex<double>(1.0, 0.3);  // self-paired slice must be real
  EXPECT_THROW(tubal::conjugate_fill(s), tubal::ConsistencyError);
}

TEST(ConjugateFill, ClearsTinyMiddleResidue) {
  SpectralTensor3d s(1, 1, 4);
  s(0, 0, 0) = 2.0;
  s(0, 0, 1) = std::complex<double>(1.0, 1.0);
  s(0, 0, 2) = std::complex<double>(1.0, 1e-15);
  tubal::conjugate_fill(s);
  EXPECT_EQ(s(0, 0, 2).imag(), 0.0);
  EXPECT_EQ(s(0, 0, 3), std::conj(s(0, 0, 1)));
}

TEST(SpectralHalfCount, CoversBothParities) {
  EXPECT_EQ(tubal::spectral_half_count(1), 1);
  EXPECT_EQ(tubal::spectral_half_count(2), 2);
  EXPECT_EQ(tubal::spectral_half_count(4), 3);
  EXPECT_EQ(tubal::spectral_half_count(5), 3);
}

TEST(TubeFft, RoundTripsAndMatchesTensorPath) {
  const Tubed t = oracle::random_tube(5, 140);
  const auto coeffs = tubal::tube_fft(t);
  const SpectralTensor3d viaTensor = tubal::fft_mode3(t.as_tensor());
  for (Index k = 0; k < 5; ++k)
    EXPECT_LT(std::abs(coeffs(k) - viaTensor(0, 0, k)), 1e-12);
  const Tubed back = tubal::tube_ifft<double>(coeffs);
  EXPECT_LT((back.vec() - t.vec()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralBlocks, RoundTrip) {
  const SpectralTensor3d s = tubal::fft_mode3(oracle::random_tensor(3, 6, 2, 150));
  const SpectralTensor3d block = tubal::lateral_block(s, 1, 3);
  SpectralTensor3d u(3, 6, 2);
  tubal::set_lateral_block(u, 1, 3, block);
  for (Index k = 0; k < 2; ++k)
    EXPECT_EQ((u.slice(k).middleCols(3, 3) - s.slice(k).middleCols(3, 3))
                  .cwiseAbs()
                  .maxCoeff(),
              0.0);
  EXPECT_THROW(tubal::lateral_block(s, 2, 3), tubal::ShapeError);
}
