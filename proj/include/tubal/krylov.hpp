#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tubal/factor.hpp"
#include "tubal/ops.hpp"

namespace tubal {

enum class Termination { converged, max_iterations, breakdown, singular };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max-iterations";
    case Termination::breakdown: return "breakdown";
    case Termination::singular: return "singular";
  }
  return "unknown";
}

// Normalization failure inside an iteration: `step` is the 1-based step at
// which it happened, `slice` the 0-based Fourier slice that fell below the
// threshold.
struct KrylovBreakdown {
  Index step;
  Index slice;
};

template <typename Scalar>
struct ResidualSample {
  Index outer;    // restart cycle (1-based); always 1 for the LS solver
  Index inner;    // inner step within the cycle (1-based)
  Scalar relres;  // estimated ||R|| / ||R_0||
};

template <typename Scalar>
struct SolveReport {
  std::vector<ResidualSample<Scalar>> history;
  Index iterations = 0;  // total inner steps across all cycles
  Index restarts = 0;    // cycles started
  double elapsed = 0;    // wall-clock seconds spent in the solver
  Scalar relres = Scalar(0);  // final explicitly recomputed ||R|| / ||R_0||
  Termination termination = Termination::max_iterations;
  bool stagnated = false;
  std::ptrdiff_t breakdown_slice = -1;
};

template <typename Scalar>
struct SolveResult {
  Tensor3<Scalar> x;
  SolveReport<Scalar> report;
};

// Cheap residual value carried by the tail tube of the projected problem.
template <typename Scalar>
Scalar residual_estimate(const Tube<Scalar>& g_tail) {
  return tl2_norm(g_tail.as_tensor());
}

namespace detail {

template <typename Scalar>
Scalar max_slice_norm(const SpectralTensor3<Scalar>& a) {
  Scalar mx = 0;
  for (Index k = 0; k < a.n3(); ++k) mx = std::max(mx, a.slice(k).norm());
  return mx;
}

// Seed normalization with zero-slice protection.  Fourier slices whose
// norm is below tol are replaced by a fixed unit-Frobenius direction (a
// constant matrix) and get an exactly zero coefficient, so the projected
// right-hand side vanishes there and the corresponding solution slices are
// left untouched; <Q, Q> = e still holds exactly.  Returns false when no
// slice reaches tol (an essentially zero seed).
template <typename Scalar>
struct SeedCoefficients {
  Eigen::Vector<Scalar, Eigen::Dynamic> coeffs;
  Index active = 0;
};

template <typename Scalar>
SeedCoefficients<Scalar> normalize_seed(SpectralTensor3<Scalar>& w,
                                        Scalar tol) {
  SeedCoefficients<Scalar> out;
  out.coeffs.setZero(w.n3());
  const Scalar unit = Scalar(1) / std::sqrt(Scalar(w.n1() * w.n2()));
  for (Index k = 0; k < w.n3(); ++k) {
    const Scalar nrm = w.slice(k).norm();
    if (nrm >= tol) {
      out.coeffs(k) = nrm;
      w.slice(k) /= nrm;
      ++out.active;
    } else {
      w.slice(k).setConstant(std::complex<Scalar>(unit, 0));
    }
  }
  return out;
}

// Shared inner machinery of GMRES and TTGK: QR-factorizes the leading
// (steps+1) x steps block of the projected coupling matrix slice by slice
// and forms g = Q^H (e_1 * rhs0).  The tail entry of g carries the exact
// residual of the projected least-squares problem; solve() back-substitutes
// for the minimizer's coefficients.
template <typename Scalar>
class ProjectedLeastSquares {
 public:
  ProjectedLeastSquares(const SpectralTensor3<Scalar>& coupling, Index steps,
                        const Eigen::Vector<Scalar, Eigen::Dynamic>& rhs0)
      : qr_(slicewise_qr(coupling, steps + 1, steps, false)),
        g_(steps + 1, 1, coupling.n3()),
        steps_(steps) {
    for (Index k = 0; k < coupling.n3(); ++k)
      for (Index i = 0; i <= steps; ++i)
        g_(i, 0, k) = rhs0(k) * std::conj(qr_.q(0, i, k));
  }

  // T-l2 norm of the tail tube g_{steps+1}.
  Scalar tail() const {
    Scalar sum = 0;
    for (Index k = 0; k < g_.n3(); ++k) sum += std::norm(g_(steps_, 0, k));
    return std::sqrt(sum / Scalar(g_.n3()));
  }

  // Coefficients y (steps x 1 x n3); throws SingularError on a dead pivot.
  SpectralTensor3<Scalar> solve() const {
    const Index n3 = g_.n3();
    Scalar diag_scale = 0;
    for (Index k = 0; k < n3; ++k)
      for (Index i = 0; i < steps_; ++i)
        diag_scale = std::max(diag_scale, std::abs(qr_.r(i, i, k)));
    const Scalar tol = Scalar(n3) * std::numeric_limits<Scalar>::epsilon() *
                       diag_scale;
    SpectralTensor3<Scalar> gtop(steps_, 1, n3);
    for (Index k = 0; k < n3; ++k)
      for (Index i = 0; i < steps_; ++i) gtop(i, 0, k) = g_(i, 0, k);
    return spectral_back_substitution(qr_.r, gtop, tol);
  }

 private:
  SpectralQRPair<Scalar> qr_;
  SpectralTensor3<Scalar> g_;
  Index steps_;
};

// Incremental tubal-global Arnoldi in the Fourier domain.
template <typename Scalar>
class ArnoldiEngine {
 public:
  using Spec = SpectralTensor3<Scalar>;
  using RealVec = Eigen::Vector<Scalar, Eigen::Dynamic>;

  // Consumes the seed.  Returns false when every seed slice is below tol.
  bool init(const Spec& a, Spec seed, Index m, Scalar tol) {
    a_ = &a;
    m_ = m;
    tol_ = tol;
    steps_ = 0;
    breakdown_.reset();
    basis_.clear();
    auto sc = normalize_seed(seed, tol);
    if (sc.active == 0) return false;
    r11_ = std::move(sc.coeffs);
    basis_.push_back(std::move(seed));
    coupling_ = Spec(m + 1, m, a.n3());
    return true;
  }

  // Runs step steps_+1; false when m is reached or normalization breaks
  // down (recorded in breakdown(), with the partial column kept).
  bool step() {
    const Index c = steps_;
    if (c >= m_) return false;
    const Index n3 = a_->n3();
    Spec w = tprod(*a_, basis_[c]);
    const Scalar pre = spectral_frob(w);
    for (Index i = 0; i <= c; ++i) {
      const SpectralTube<Scalar> hij = spectral_inner(basis_[i], w);
      for (Index k = 0; k < n3; ++k) {
        w.slice(k) -= hij(k) * basis_[i].slice(k);
        coupling_(i, c, k) = hij(k);
      }
    }
    if (spectral_frob(w) < Scalar(0.7) * pre) {
      for (Index i = 0; i <= c; ++i) {
        const SpectralTube<Scalar> corr = spectral_inner(basis_[i], w);
        for (Index k = 0; k < n3; ++k) {
          w.slice(k) -= corr(k) * basis_[i].slice(k);
          coupling_(i, c, k) += corr(k);
        }
      }
    }
    auto outcome = spectral_normalize(w, tol_);
    steps_ = c + 1;
    if (outcome.bad_slice >= 0) {
      breakdown_ = KrylovBreakdown{steps_, outcome.bad_slice};
      return false;
    }
    for (Index k = 0; k < n3; ++k)
      coupling_(c + 1, c, k) = std::complex<Scalar>(outcome.norms(k), 0);
    basis_.push_back(std::move(w));
    return true;
  }

  Index steps() const { return steps_; }
  const std::optional<KrylovBreakdown>& breakdown() const { return breakdown_; }
  const std::vector<Spec>& basis() const { return basis_; }
  const Spec& coupling() const { return coupling_; }
  const RealVec& r11() const { return r11_; }

 private:
  const Spec* a_ = nullptr;
  Index m_ = 0;
  Scalar tol_ = 0;
  Index steps_ = 0;
  std::vector<Spec> basis_;
  Spec coupling_;
  RealVec r11_;
  std::optional<KrylovBreakdown> breakdown_;
};

template <typename Scalar>
SpectralTensor3<Scalar> spectral_residual(const SpectralTensor3<Scalar>& b,
                                          const SpectralTensor3<Scalar>& a,
                                          const SpectralTensor3<Scalar>& x) {
  SpectralTensor3<Scalar> r = tprod(a, x);
  for (Index k = 0; k < r.n3(); ++k) r.slice(k) = b.slice(k) - r.slice(k);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tubal-global Arnoldi
// ---------------------------------------------------------------------------

template <typename Scalar>
struct ArnoldiDecomposition {
  // Basis blocks V_1, ..., V_{steps_completed + 1} side by side; one block
  // fewer when the run ended in breakdown (the failed block is dropped).
  Tensor3<Scalar> basis;
  // (steps_completed + 1) x steps_completed Hessenberg of coupling tubes;
  // on breakdown its bottom-right tube is zero.
  TubalMatrix<Scalar> hbar;
  Tube<Scalar> beta;  // r_{1,1} from normalizing the seed
  Index steps_completed = 0;
  std::optional<KrylovBreakdown> breakdown;
};

// Builds a T-orthonormal basis of the tubal-global Krylov subspace spanned
// by V, A*V, A^2*V, ... with tube-valued Gram-Schmidt coefficients.  Seed
// slices below tolerance are placeholder-normalized (zero coefficient in
// beta); an all-zero seed throws BreakdownError.  tol <= 0 selects
// 1e-12 relative to the larger of the operand's and seed's Fourier-slice
// norms.
template <typename Scalar>
ArnoldiDecomposition<Scalar> tubal_global_arnoldi(const Tensor3<Scalar>& a,
                                                  const Tensor3<Scalar>& v,
                                                  Index m,
                                                  Scalar tol = Scalar(-1)) {
  if (a.n1() != a.n2()) throw ShapeError("tubal_global_arnoldi: a must be square");
  if (a.n3() != v.n3() || a.n2() != v.n1())
    throw ShapeError("tubal_global_arnoldi: a and v do not conform");
  if (m < 1) throw Error("tubal_global_arnoldi: m must be at least 1");

  const SpectralTensor3<Scalar> ahat = fft_mode3(a);
  SpectralTensor3<Scalar> seed = fft_mode3(v);
  const Scalar eff =
      tol > Scalar(0)
          ? tol
          : Scalar(1e-12) * std::max(detail::max_slice_norm(ahat),
                                     detail::max_slice_norm(seed));

  detail::ArnoldiEngine<Scalar> engine;
  if (!engine.init(ahat, std::move(seed), m, eff))
    throw BreakdownError("tubal_global_arnoldi: zero seed", 0);
  while (engine.steps() < m && !engine.breakdown()) engine.step();

  const Index steps = engine.steps(), n3 = a.n3(), s = v.n2();
  ArnoldiDecomposition<Scalar> out;
  out.steps_completed = steps;
  out.breakdown = engine.breakdown();
  out.beta = detail::tube_from_real_spectrum<Scalar>(engine.r11());

  const auto& blocks = engine.basis();
  SpectralTensor3<Scalar> all(v.n1(), Index(blocks.size()) * s, n3);
  for (Index j = 0; j < Index(blocks.size()); ++j)
    set_lateral_block(all, j, s, blocks[j]);
  out.basis = ifft_mode3(all);

  SpectralTensor3<Scalar> hh(steps + 1, steps, n3);
  for (Index k = 0; k < n3; ++k)
    hh.slice(k) = engine.coupling().slice(k).topLeftCorner(steps + 1, steps);
  out.hbar = TubalMatrix<Scalar>(ifft_mode3(hh));
  return out;
}

// ---------------------------------------------------------------------------
// Restarted tubal-global GMRES
// ---------------------------------------------------------------------------

// Solves A*X = B for square A by restarted GMRES over the tubal-global
// Krylov subspace.  Per cycle: Arnoldi from R_0 = B - A*X_0, slice-wise QR
// of the projected Hessenberg, tubal back substitution, basis update.  The
// per-step residual value is the cheap tail estimate; an explicit residual
// is recomputed at every cycle boundary and reported.  x0 may be empty
// (zero start).  Singular projected systems and stagnation terminate with
// the corresponding report states rather than throwing.
template <typename Scalar>
SolveResult<Scalar> ttg_gmres(const Tensor3<Scalar>& a, const Tensor3<Scalar>& b,
                              const Tensor3<Scalar>& x0, Index m,
                              Index max_restarts, Scalar tol) {
  if (a.n1() != a.n2()) throw ShapeError("ttg_gmres: a must be square");
  if (b.n1() != a.n1() || b.n3() != a.n3())
    throw ShapeError("ttg_gmres: b does not conform with a");
  const bool have_x0 = x0.size() > 0;
  if (have_x0 && !x0.same_shape(b))
    throw ShapeError("ttg_gmres: x0 must match b");
  if (m < 1 || max_restarts < 1)
    throw Error("ttg_gmres: m and max_restarts must be at least 1");
  if (!(tol > Scalar(0))) throw Error("ttg_gmres: tol must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  const Index n3 = a.n3(), s = b.n2();
  const SpectralTensor3<Scalar> ahat = fft_mode3(a);
  const SpectralTensor3<Scalar> bhat = fft_mode3(b);
  SpectralTensor3<Scalar> xhat =
      have_x0 ? fft_mode3(x0) : SpectralTensor3<Scalar>(a.n2(), s, n3);
  const Scalar btol = Scalar(1e-12) * std::max(detail::max_slice_norm(ahat),
                                               detail::max_slice_norm(bhat));

  SolveResult<Scalar> out;
  SolveReport<Scalar>& rep = out.report;

  SpectralTensor3<Scalar> rhat = detail::spectral_residual(bhat, ahat, xhat);
  const Scalar res0 = detail::spectral_frob(rhat);
  Scalar res = res0;

  auto finish = [&](Termination term) {
    rep.termination = term;
    rep.relres = res0 > Scalar(0) ? res / res0 : Scalar(0);
    rep.elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    out.x = ifft_mode3(xhat);
  };

  if (res0 == Scalar(0)) {
    finish(Termination::converged);
    return out;
  }

  Scalar prev_cycle_relres = std::numeric_limits<Scalar>::infinity();
  detail::ArnoldiEngine<Scalar> engine;

  for (Index cycle = 1; cycle <= max_restarts; ++cycle) {
    const Scalar relres = res / res0;
    if (relres < tol) {
      finish(Termination::converged);
      return out;
    }
    if (std::abs(prev_cycle_relres - relres) < Scalar(1e-14)) {
      rep.stagnated = true;
      finish(Termination::max_iterations);
      return out;
    }
    prev_cycle_relres = relres;

    if (!engine.init(ahat, std::move(rhat), m, btol)) {
      rep.breakdown_slice = 0;
      finish(Termination::breakdown);
      return out;
    }
    rep.restarts = cycle;

    std::optional<detail::ProjectedLeastSquares<Scalar>> ls;
    bool inner_done = false;
    while (!inner_done) {
      const bool ok = engine.step();
      if (!ok && !engine.breakdown()) break;  // m exhausted
      ++rep.iterations;
      ls.emplace(engine.coupling(), engine.steps(), engine.r11());
      const Scalar est = ls->tail() / res0;
      rep.history.push_back({cycle, engine.steps(), est});
      inner_done = !ok || est < tol || engine.steps() == m;
    }

    SpectralTensor3<Scalar> y;
    try {
      y = ls->solve();
    } catch (const SingularError&) {
      finish(Termination::singular);
      return out;
    }
    const auto& blocks = engine.basis();
    for (Index i = 0; i < engine.steps(); ++i)
      for (Index k = 0; k < n3; ++k)
        xhat.slice(k) += y(i, 0, k) * blocks[i].slice(k);

    rhat = detail::spectral_residual(bhat, ahat, xhat);
    res = detail::spectral_frob(rhat);

    if (engine.breakdown()) {
      rep.breakdown_slice = engine.breakdown()->slice;
      finish(res / res0 < tol ? Termination::converged
                              : Termination::breakdown);
      return out;
    }
  }

  finish(res / res0 < tol ? Termination::converged
                          : Termination::max_iterations);
  return out;
}

// ---------------------------------------------------------------------------
// Tubal-global Golub-Kahan bidiagonalization
// ---------------------------------------------------------------------------

template <typename Scalar>
struct BidiagDecomposition {
  // U blocks: steps_completed + 1 of them after a clean run; one fewer when
  // the U-side normalization broke down.  V blocks: steps_completed.
  Tensor3<Scalar> u_basis;
  Tensor3<Scalar> v_basis;
  // (steps_completed + 1) x steps_completed lower bidiagonal: diagonal
  // tubes b_j, subdiagonal tubes a_{j+1} (zero bottom row after a U-side
  // breakdown).
  TubalMatrix<Scalar> cbar;
  Tube<Scalar> a1;  // from normalizing the seed B
  Index steps_completed = 0;
  std::optional<KrylovBreakdown> breakdown;
};

namespace detail {

// Fourier-domain Golub-Kahan stepper.  Each new direction gets one
// unconditional re-orthogonalization pass against its side's basis; the
// corrections stay out of the bidiagonal tubes.
template <typename Scalar>
class BidiagEngine {
 public:
  using Spec = SpectralTensor3<Scalar>;
  using RealVec = Eigen::Vector<Scalar, Eigen::Dynamic>;

  // Consumes the seed (spectral B).  False when the seed is all-zero.
  bool init(const Spec& a, Spec seed, Scalar tol) {
    a_ = &a;
    tol_ = tol;
    steps_ = 0;
    breakdown_.reset();
    u_.clear();
    v_.clear();
    a_coeffs_.clear();
    b_coeffs_.clear();
    auto sc = normalize_seed(seed, tol);
    if (sc.active == 0) return false;
    a_coeffs_.push_back(std::move(sc.coeffs));
    u_.push_back(std::move(seed));
    return true;
  }

  bool step() {
    const Index n3 = a_->n3();
    const Index j = steps_;  // executing 1-based step j+1

    Spec vt(a_->n2(), u_[j].n2(), n3);
    for (Index k = 0; k < n3; ++k)
      vt.slice(k).noalias() = a_->slice(k).adjoint() * u_[j].slice(k);
    if (j > 0)
      for (Index k = 0; k < n3; ++k)
        vt.slice(k) -= a_coeffs_[j](k) * v_[j - 1].slice(k);
    reorthogonalize(vt, v_);
    auto vout = spectral_normalize(vt, tol_);
    if (vout.bad_slice >= 0) {
      breakdown_ = KrylovBreakdown{j + 1, vout.bad_slice};
      return false;
    }
    b_coeffs_.push_back(std::move(vout.norms));
    v_.push_back(std::move(vt));

    Spec ut = tprod(*a_, v_[j]);
    for (Index k = 0; k < n3; ++k)
      ut.slice(k) -= b_coeffs_[j](k) * u_[j].slice(k);
    reorthogonalize(ut, u_);
    auto uout = spectral_normalize(ut, tol_);
    steps_ = j + 1;
    if (uout.bad_slice >= 0) {
      breakdown_ = KrylovBreakdown{j + 1, uout.bad_slice};
      return false;
    }
    a_coeffs_.push_back(std::move(uout.norms));
    u_.push_back(std::move(ut));
    return true;
  }

  Index steps() const { return steps_; }
  const std::optional<KrylovBreakdown>& breakdown() const { return breakdown_; }
  const std::vector<Spec>& u() const { return u_; }
  const std::vector<Spec>& v() const { return v_; }
  const RealVec& seed_coeffs() const { return a_coeffs_[0]; }

  // Lower-bidiagonal coupling of the first `steps` completed steps as a
  // (steps+1) x steps spectral tensor (bottom row zero when U broke down).
  Spec coupling() const {
    const Index n3 = a_->n3();
    Spec c(steps_ + 1, std::max<Index>(steps_, 1), n3);
    for (Index jj = 0; jj < steps_; ++jj)
      for (Index k = 0; k < n3; ++k) {
        c(jj, jj, k) = std::complex<Scalar>(b_coeffs_[jj](k), 0);
        if (jj + 1 < Index(a_coeffs_.size()))
          c(jj + 1, jj, k) = std::complex<Scalar>(a_coeffs_[jj + 1](k), 0);
      }
    return c;
  }

 private:
  void reorthogonalize(Spec& w, const std::vector<Spec>& against) {
    const Index n3 = w.n3();
    for (const Spec& q : against) {
      const SpectralTube<Scalar> c = spectral_inner(q, w);
      for (Index k = 0; k < n3; ++k) w.slice(k) -= c(k) * q.slice(k);
    }
  }

  const Spec* a_ = nullptr;
  Scalar tol_ = 0;
  Index steps_ = 0;
  std::vector<Spec> u_, v_;
  std::vector<RealVec> a_coeffs_;  // a_1 (seed), a_2, ...
  std::vector<RealVec> b_coeffs_;  // b_1, b_2, ...
  std::optional<KrylovBreakdown> breakdown_;
};

}  // namespace detail

// Runs k steps of tubal-global Golub-Kahan bidiagonalization of a seeded
// with b.  Breakdown truncates (V-side failure keeps j-1 complete steps,
// U-side failure keeps j with a zero bottom coupling row).  A zero b
// throws BreakdownError.  tol <= 0 selects 1e-12 relative to the larger
// of the operand's and seed's Fourier-slice norms.
template <typename Scalar>
BidiagDecomposition<Scalar> ttg_golub_kahan(const Tensor3<Scalar>& a,
                                            const Tensor3<Scalar>& b, Index k,
                                            Scalar tol = Scalar(-1)) {
  if (b.n1() != a.n1() || b.n3() != a.n3())
    throw ShapeError("ttg_golub_kahan: b does not conform with a");
  if (k < 1) throw Error("ttg_golub_kahan: k must be at least 1");

  const SpectralTensor3<Scalar> ahat = fft_mode3(a);
  SpectralTensor3<Scalar> seed = fft_mode3(b);
  const Scalar eff =
      tol > Scalar(0)
          ? tol
          : Scalar(1e-12) * std::max(detail::max_slice_norm(ahat),
                                     detail::max_slice_norm(seed));

  detail::BidiagEngine<Scalar> engine;
  if (!engine.init(ahat, std::move(seed), eff))
    throw BreakdownError("ttg_golub_kahan: zero seed", 0);
  while (engine.steps() < k && !engine.breakdown()) engine.step();

  const Index n3 = a.n3(), s = b.n2();
  BidiagDecomposition<Scalar> out;
  out.steps_completed = engine.steps();
  out.breakdown = engine.breakdown();
  out.a1 = detail::tube_from_real_spectrum<Scalar>(engine.seed_coeffs());

  auto assemble = [&](const std::vector<SpectralTensor3<Scalar>>& blocks,
                      Index n_rows) {
    SpectralTensor3<Scalar> all(n_rows, Index(blocks.size()) * s, n3);
    for (Index j = 0; j < Index(blocks.size()); ++j)
      set_lateral_block(all, j, s, blocks[j]);
    return ifft_mode3(all);
  };
  out.u_basis = assemble(engine.u(), a.n1());
  if (!engine.v().empty()) out.v_basis = assemble(engine.v(), a.n2());
  if (engine.steps() > 0)
    out.cbar = TubalMatrix<Scalar>(ifft_mode3(engine.coupling()));
  return out;
}

// ---------------------------------------------------------------------------
// TTGK least-squares solver
// ---------------------------------------------------------------------------

// Minimizes ||B - A*X||_F over the growing Golub-Kahan subspaces, one
// bidiagonalization step per outer iteration, solving the projected
// bidiagonal least-squares problem by slice-wise QR plus tubal back
// substitution.  Stops when the estimated relative residual drops below
// tol or after kmax steps; breakdown means the subspace became invariant
// and is final.  Zero b throws BreakdownError.
template <typename Scalar>
SolveResult<Scalar> ttgk_solve(const Tensor3<Scalar>& a,
                               const Tensor3<Scalar>& b, Index kmax,
                               Scalar tol) {
  if (b.n1() != a.n1() || b.n3() != a.n3())
    throw ShapeError("ttgk_solve: b does not conform with a");
  if (kmax < 1) throw Error("ttgk_solve: kmax must be at least 1");
  if (!(tol > Scalar(0))) throw Error("ttgk_solve: tol must be positive");

  const auto t0 = std::chrono::steady_clock::now();
  const Index n3 = a.n3(), s = b.n2();
  const SpectralTensor3<Scalar> ahat = fft_mode3(a);
  const SpectralTensor3<Scalar> bhat = fft_mode3(b);
  const Scalar btol = Scalar(1e-12) * std::max(detail::max_slice_norm(ahat),
                                               detail::max_slice_norm(bhat));
  const Scalar res0 = detail::spectral_frob(bhat);

  detail::BidiagEngine<Scalar> engine;
  {
    SpectralTensor3<Scalar> seed = bhat;
    if (!engine.init(ahat, std::move(seed), btol))
      throw BreakdownError("ttgk_solve: zero right-hand side", 0);
  }

  SolveResult<Scalar> out;
  SolveReport<Scalar>& rep = out.report;
  std::optional<detail::ProjectedLeastSquares<Scalar>> ls;
  bool met_tol = false;

  while (engine.steps() < kmax) {
    const Index before = engine.steps();
    const bool ok = engine.step();
    if (!ok && engine.steps() == before) break;  // nothing new to project
    ++rep.iterations;
    ls.emplace(engine.coupling(), engine.steps(), engine.seed_coeffs());
    const Scalar est = ls->tail() / res0;
    rep.history.push_back({1, engine.steps(), est});
    if (est < tol) {
      met_tol = true;
      break;
    }
    if (!ok) break;  // basis is invariant, nothing more to gain
  }

  SpectralTensor3<Scalar> xhat(a.n2(), s, n3);
  Termination term = Termination::breakdown;  // stays when no step completed
  if (ls) {
    try {
      const SpectralTensor3<Scalar> y = ls->solve();
      for (Index i = 0; i < engine.steps(); ++i)
        for (Index k = 0; k < n3; ++k)
          xhat.slice(k) += y(i, 0, k) * engine.v()[i].slice(k);
      term = met_tol ? Termination::converged
             : engine.breakdown() ? Termination::breakdown
                                  : Termination::max_iterations;
    } catch (const SingularError&) {
      term = Termination::singular;
      xhat = SpectralTensor3<Scalar>(a.n2(), s, n3);
    }
  }
  if (engine.breakdown()) rep.breakdown_slice = engine.breakdown()->slice;

  const SpectralTensor3<Scalar> rhat =
      detail::spectral_residual(bhat, ahat, xhat);
  rep.relres = detail::spectral_frob(rhat) / res0;
  if (rep.relres < tol && (term == Termination::breakdown ||
                           term == Termination::max_iterations))
    term = Termination::converged;
  rep.termination = term;
  rep.restarts = 0;
  rep.elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  out.x = ifft_mode3(xhat);
  return out;
}

}  // namespace tubal
