#include <gtest/gtest.h>

#include "oracles.hpp"
#include "property_checks.hpp"
#include "tubal/tubal.hpp"

using tubal::Index;
using tubal::Tensor3d;
using tubal::Termination;
using tubal::Tubed;

namespace {

// Random square operator kept comfortably nonsingular by a dominant
// constant-tube diagonal.
Tensor3d shifted_random(Index n, Index n3, std::uint64_t seed, double shift,
                        double spread) {
  Tensor3d a = oracle::random_tensor(n, n, n3, seed, -spread, spread);
  a.slice(0).diagonal().array() += shift;
  return a;
}

double explicit_relres(const Tensor3d& a, const Tensor3d& b, const Tensor3d& x) {
  return tubal::frob_norm(b - tubal::tprod(a, x)) / tubal::frob_norm(b);
}

}  // namespace

TEST(Arnoldi, IdentityOperatorBreaksDownImmediately) {
  const Tensor3d a = Tensor3d::identity(4, 3);
  const Tensor3d v = oracle::random_tensor(4, 2, 3, 401);
  const auto dec = tubal::tubal_global_arnoldi(a, v, 3);

  EXPECT_EQ(dec.steps_completed, 1);
  ASSERT_TRUE(dec.breakdown.has_value());
  EXPECT_EQ(dec.breakdown->step, 1);
  EXPECT_EQ(dec.basis.n2(), 2);  // the failed block is not kept
  ASSERT_EQ(dec.hbar.rows(), 2);
  ASSERT_EQ(dec.hbar.cols(), 1);
  EXPECT_LT((dec.hbar.tube(0, 0).vec() - Tubed::unit(3).vec()).norm(), 1e-12);
  EXPECT_LT(dec.hbar.tube(1, 0).vec().norm(), 1e-12);
}

TEST(Arnoldi, CouplingRelationsHold) {
  EXPECT_LT(checks::arnoldi_relations(410, 8, 2, 4, 3), 1e-10);
  EXPECT_LT(checks::arnoldi_relations(411, 10, 3, 5, 4), 1e-10);
  EXPECT_LT(checks::arnoldi_relations(412, 10, 1, 5, 4), 1e-10);
}

TEST(Arnoldi, BasisIsDualOrthonormal) {
  const Tensor3d a = oracle::random_tensor(6, 6, 4, 413);
  const Tensor3d v = oracle::random_tensor(6, 1, 4, 414);
  const auto dec = tubal::tubal_global_arnoldi(a, v, 4);
  ASSERT_FALSE(dec.breakdown.has_value());
  EXPECT_LT(checks::defect(tubal::tdiamond(dec.basis, dec.basis, 1),
                           tubal::TubalMatrixd::identity(5, 4).tensor()),
            1e-10);
  EXPECT_TRUE(dec.hbar.is_upper_hessenberg(
      1e-12 * dec.hbar.tensor().flat().cwiseAbs().maxCoeff()));
}

TEST(Arnoldi, CouplingTubesAreInnerProducts) {
  const Index s = 2, m = 3;
  const Tensor3d a = oracle::random_tensor(7, 7, 3, 415);
  const Tensor3d v = oracle::random_tensor(7, s, 3, 416);
  const auto dec = tubal::tubal_global_arnoldi(a, v, m);
  ASSERT_EQ(dec.steps_completed, m);
  for (Index j = 0; j < m; ++j) {
    const Tensor3d av = tubal::tprod(a, lateral_block(dec.basis, j, s));
    for (Index i = 0; i <= j + 1; ++i) {
      const Tubed want = tubal::inner_t(lateral_block(dec.basis, i, s), av);
      EXPECT_LT((dec.hbar.tube(i, j).vec() - want.vec()).norm(), 1e-10)
          << "(" << i << "," << j << ")";
    }
  }
}

TEST(Arnoldi, MatchesDenseArnoldiAtDepthOne) {
  const Tensor3d a = shifted_random(12, 1, 417, 3.0, 1.0);
  const Tensor3d v = oracle::random_tensor(12, 1, 1, 418);
  const auto dec = tubal::tubal_global_arnoldi(a, v, 5);
  const auto dense = oracle::dense_arnoldi(oracle::front_slice(a),
                                           oracle::front_vector(v), 5, 1e-20);
  ASSERT_EQ(dec.steps_completed, dense.steps);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 5; ++j)
      EXPECT_NEAR(dec.hbar.tensor()(i, j, 0), dense.h(i, j), 1e-8);
  EXPECT_NEAR(dec.beta(0), dense.beta, 1e-10);
  for (Index j = 0; j < 6; ++j) {
    const Eigen::VectorXd got = oracle::front_vector(lateral_block(dec.basis, j, 1));
    EXPECT_LT((got - dense.v.col(j)).norm(), 1e-8) << "column " << j;
  }
}

TEST(Arnoldi, RejectsBadInputs) {
  const Tensor3d a = oracle::random_tensor(4, 4, 2, 419);
  const Tensor3d v = oracle::random_tensor(4, 1, 2, 420);
  EXPECT_THROW(tubal::tubal_global_arnoldi(oracle::random_tensor(4, 3, 2, 421), v, 2),
               tubal::ShapeError);
  EXPECT_THROW(tubal::tubal_global_arnoldi(a, oracle::random_tensor(3, 1, 2, 422), 2),
               tubal::ShapeError);
  EXPECT_THROW(tubal::tubal_global_arnoldi(a, v, 0), tubal::Error);
  Tensor3d zero(4, 1, 2);
  zero.setZero();
  EXPECT_THROW(tubal::tubal_global_arnoldi(a, zero, 2), tubal::BreakdownError);
}

TEST(ResidualEstimate, IsTubalL2OfTailTube) {
  EXPECT_NEAR(tubal::residual_estimate(Tubed::unit(4)), 1.0, 1e-13);
  const Tubed g = oracle::random_tube(5, 423);
  EXPECT_NEAR(tubal::residual_estimate(g), tubal::tl2_norm(g.as_tensor()), 1e-13);
}

TEST(Gmres, IdentityConvergesInOneStep) {
  const Tensor3d a = Tensor3d::identity(5, 3);
  const Tensor3d b = oracle::random_tensor(5, 2, 3, 430);
  const auto [x, rep] = tubal::ttg_gmres(a, b, Tensor3d(), 4, 3, 1e-6);

  EXPECT_EQ(rep.termination, Termination::converged);
  EXPECT_EQ(rep.iterations, 1);
  EXPECT_EQ(rep.restarts, 1);
  ASSERT_EQ(rep.history.size(), 1u);
  EXPECT_EQ(rep.history[0].outer, 1);
  EXPECT_EQ(rep.history[0].inner, 1);
  EXPECT_LT(checks::defect(x, b), 1e-12);
  EXPECT_LT(rep.relres, 1e-12);
}

TEST(Gmres, SolvesWellConditionedSystem) {
  const Tensor3d a = shifted_random(12, 3, 431, 4.0, 0.4);
  const Tensor3d x_star = oracle::random_tensor(12, 2, 3, 432);
  const Tensor3d b = tubal::tprod(a, x_star);
  const auto [x, rep] = tubal::ttg_gmres(a, b, Tensor3d(), 6, 30, 1e-10);

  EXPECT_EQ(rep.termination, Termination::converged);
  EXPECT_LT(rep.relres, 1e-10);
  EXPECT_LT(checks::defect(x, x_star), 1e-8);
  EXPECT_NEAR(rep.relres, explicit_relres(a, b, x), 1e-8);
}

TEST(Gmres, StartsFromGivenIterate) {
  const Tensor3d a = shifted_random(10, 2, 433, 4.0, 0.4);
  const Tensor3d x_star = oracle::random_tensor(10, 1, 2, 434);
  const Tensor3d b = tubal::tprod(a, x_star);
  const Tensor3d x0 = 0.5 * x_star;
  const auto [x, rep] = tubal::ttg_gmres(a, b, x0, 5, 20, 1e-9);

  EXPECT_EQ(rep.termination, Termination::converged);
  // Residuals are normalized by the initial residual, not by ||b||.
  const double r0 = tubal::frob_norm(b - tubal::tprod(a, x0));
  const double rfinal = tubal::frob_norm(b - tubal::tprod(a, x));
  EXPECT_NEAR(rep.relres, rfinal / r0, 1e-8);
}

TEST(Gmres, HistoryMatchesDenseGmresAtDepthOne) {
  for (std::uint64_t seed : {440u, 441u, 442u}) {
    const Tensor3d a = shifted_random(30, 1, seed, 4.0, 0.3);
    const Tensor3d b = oracle::random_tensor(30, 1, 1, seed + 100);
    const auto [x, rep] = tubal::ttg_gmres(a, b, Tensor3d(), 8, 50, 1e-10);
    const auto dense = oracle::dense_gmres(oracle::front_slice(a),
                                           oracle::front_vector(b), 8, 50, 1e-10);

    ASSERT_EQ(rep.history.size(), dense.history.size()) << "seed " << seed;
    for (std::size_t i = 0; i < dense.history.size(); ++i)
      EXPECT_NEAR(rep.history[i].relres, dense.history[i], 1e-8)
          << "seed " << seed << " step " << i;
    EXPECT_EQ(rep.iterations, dense.iterations);
    EXPECT_EQ(rep.restarts, dense.restarts);
    EXPECT_NEAR(rep.relres, dense.relres, 1e-8);
    EXPECT_LT((oracle::front_vector(x) - dense.x).norm(),
              1e-6 * dense.x.norm());
  }
}

TEST(Gmres, EstimateIsMonotoneWithinCycle) {
  const Tensor3d a = shifted_random(14, 3, 443, 3.5, 0.5);
  const Tensor3d b = oracle::random_tensor(14, 2, 3, 444);
  const auto result = tubal::ttg_gmres(a, b, Tensor3d(), 6, 4, 1e-13);
  const auto& hist = result.report.history;
  ASSERT_GT(hist.size(), 1u);
  for (std::size_t i = 1; i < hist.size(); ++i) {
    if (hist[i].outer == hist[i - 1].outer) {
      EXPECT_LE(hist[i].relres, hist[i - 1].relres + 1e-12) << "step " << i;
    }
  }
}

TEST(Gmres, FinalEstimateAgreesWithExplicitResidual) {
  const Tensor3d a = shifted_random(10, 4, 445, 4.0, 0.5);
  const Tensor3d b = oracle::random_tensor(10, 1, 4, 446);
  const auto [x, rep] = tubal::ttg_gmres(a, b, Tensor3d(), 5, 40, 1e-9);
  ASSERT_EQ(rep.termination, Termination::converged);
  ASSERT_FALSE(rep.history.empty());
  EXPECT_NEAR(rep.history.back().relres, rep.relres,
              1e-8 * std::max(1.0, rep.relres));
  EXPECT_NEAR(rep.relres, explicit_relres(a, b, x), 1e-10);
}

TEST(Gmres, StagnationIsFlagged) {
  // GMRES(1) makes no progress on a plane rotation, so the second cycle
  // starts from an unchanged residual.
  Tensor3d a(2, 2, 1);
  a.setZero();
  a(0, 1, 0) = 1.0;
  a(1, 0, 0) = -1.0;
  Tensor3d b(2, 1, 1);
  b.setZero();
  b(0, 0, 0) = 1.0;
  const auto [x, rep] = tubal::ttg_gmres(a, b, Tensor3d(), 1, 10, 1e-6);

  EXPECT_TRUE(rep.stagnated);
  EXPECT_EQ(rep.termination, Termination::max_iterations);
  EXPECT_EQ(rep.restarts, 1);
  EXPECT_EQ(rep.iterations, 1);
  EXPECT_NEAR(rep.relres, 1.0, 1e-12);
}

TEST(Gmres, HappyBreakdownSolvesProjectedProblem) {
  // The operator has a degree-2 minimal polynomial on the seed, so the
  // subspace turns invariant at step 2 and the projected solve is exact.
  Tensor3d a(4, 4, 1);
  a.setZero();
  a.slice(0).diagonal() << 2, 2, 3, 3;
  Tensor3d b(4, 1, 1);
  b.flat().setOnes();
  const auto [x, rep] = tubal::ttg_gmres(a, b, Tensor3d(), 5, 3, 1e-10);

  EXPECT_EQ(rep.termination, Termination::converged);
  EXPECT_EQ(rep.iterations, 2);
  EXPECT_GE(rep.breakdown_slice, 0);
  Tensor3d want(4, 1, 1);
  want(0, 0, 0) = 0.5;
  want(1, 0, 0) = 0.5;
  want(2, 0, 0) = 1.0 / 3.0;
  want(3, 0, 0) = 1.0 / 3.0;
  EXPECT_LT(checks::defect(x, want), 1e-10);
}

TEST(Gmres, ZeroOperatorEndsSingular) {
  Tensor3d a(3, 3, 2);
  a.setZero();
  const Tensor3d b = oracle::random_tensor(3, 1, 2, 447);
  const auto [x, rep] = tubal::ttg_gmres(a, b, Tensor3d(), 3, 2, 1e-6);
  EXPECT_EQ(rep.termination, Termination::singular);
  EXPECT_EQ(x.flat().norm(), 0.0);
}

TEST(Gmres, RejectsBadArguments) {
  const Tensor3d a = oracle::random_tensor(4, 4, 2, 448);
  const Tensor3d b = oracle::random_tensor(4, 1, 2, 449);
  EXPECT_THROW(tubal::ttg_gmres(oracle::random_tensor(4, 3, 2, 450), b,
                                Tensor3d(), 2, 2, 1e-6),
               tubal::ShapeError);
  EXPECT_THROW(tubal::ttg_gmres(a, oracle::random_tensor(3, 1, 2, 451),
                                Tensor3d(), 2, 2, 1e-6),
               tubal::ShapeError);
  EXPECT_THROW(tubal::ttg_gmres(a, b, oracle::random_tensor(4, 2, 2, 452), 2, 2,
                                1e-6),
               tubal::ShapeError);
  EXPECT_THROW(tubal::ttg_gmres(a, b, Tensor3d(), 0, 2, 1e-6), tubal::Error);
  EXPECT_THROW(tubal::ttg_gmres(a, b, Tensor3d(), 2, 0, 1e-6), tubal::Error);
  EXPECT_THROW(tubal::ttg_gmres(a, b, Tensor3d(), 2, 2, 0.0), tubal::Error);
}

TEST(GolubKahan, IdentityOperatorBreaksDownAfterOneStep) {
  const Tensor3d a = Tensor3d::identity(4, 3);
  const Tensor3d b = oracle::random_tensor(4, 2, 3, 460);
  const auto dec = tubal::ttg_golub_kahan(a, b, 3);

  EXPECT_EQ(dec.steps_completed, 1);
  ASSERT_TRUE(dec.breakdown.has_value());
  EXPECT_EQ(dec.breakdown->step, 1);
  EXPECT_EQ(dec.u_basis.n2(), 2);  // U_1 only: the U side broke down
  EXPECT_EQ(dec.v_basis.n2(), 2);
  ASSERT_EQ(dec.cbar.rows(), 2);
  ASSERT_EQ(dec.cbar.cols(), 1);
  EXPECT_LT((dec.cbar.tube(0, 0).vec() - Tubed::unit(3).vec()).norm(), 1e-12);
  EXPECT_LT(dec.cbar.tube(1, 0).vec().norm(), 1e-12);
}

TEST(GolubKahan, CouplingRelationsHold) {
  EXPECT_LT(checks::golub_kahan_relations(461, 6, 4, 2, 3, 3), 1e-10);
  EXPECT_LT(checks::golub_kahan_relations(462, 8, 6, 2, 3, 3), 1e-10);
  EXPECT_LT(checks::golub_kahan_relations(463, 7, 7, 1, 4, 4), 1e-10);
}

TEST(GolubKahan, BothBasesAreDualOrthonormal) {
  const Index s = 2, k = 3, n3 = 3;
  const Tensor3d a = oracle::random_tensor(8, 6, n3, 464);
  const Tensor3d b = oracle::random_tensor(8, s, n3, 465);
  const auto dec = tubal::ttg_golub_kahan(a, b, k);
  ASSERT_EQ(dec.steps_completed, k);
  EXPECT_LT(checks::defect(tubal::tdiamond(dec.u_basis, dec.u_basis, s),
                           tubal::TubalMatrixd::identity(k + 1, n3).tensor()),
            1e-10);
  EXPECT_LT(checks::defect(tubal::tdiamond(dec.v_basis, dec.v_basis, s),
                           tubal::TubalMatrixd::identity(k, n3).tensor()),
            1e-10);
}

TEST(GolubKahan, MatchesDenseBidiagonalizationAtDepthOne) {
  const Tensor3d a = oracle::random_tensor(8, 5, 1, 466);
  const Tensor3d b = oracle::random_tensor(8, 1, 1, 467);
  const auto dec = tubal::ttg_golub_kahan(a, b, 4);
  const auto dense = oracle::dense_golub_kahan(oracle::front_slice(a),
                                               oracle::front_vector(b), 4, 1e-20);
  ASSERT_EQ(dec.steps_completed, dense.steps);
  EXPECT_NEAR(dec.a1(0), dense.beta1, 1e-10);
  for (Index i = 0; i < dec.cbar.rows(); ++i)
    for (Index j = 0; j < dec.cbar.cols(); ++j)
      EXPECT_NEAR(dec.cbar.tensor()(i, j, 0), dense.bidiag(i, j), 1e-8);
  for (Index j = 0; j < 4; ++j) {
    EXPECT_LT((oracle::front_vector(lateral_block(dec.v_basis, j, 1)) -
               dense.v.col(j))
                  .norm(),
              1e-8);
    EXPECT_LT((oracle::front_vector(lateral_block(dec.u_basis, j, 1)) -
               dense.u.col(j))
                  .norm(),
              1e-8);
  }
}

TEST(GolubKahan, LeftNullSeedBreaksTheFirstVStep) {
  Tensor3d a(2, 2, 1);
  a.setZero();
  a(0, 0, 0) = 1.0;
  Tensor3d b(2, 1, 1);
  b.setZero();
  b(1, 0, 0) = 1.0;  // in the left null space of a
  const auto dec = tubal::ttg_golub_kahan(a, b, 3);

  EXPECT_EQ(dec.steps_completed, 0);
  ASSERT_TRUE(dec.breakdown.has_value());
  EXPECT_EQ(dec.breakdown->step, 1);
  EXPECT_EQ(dec.u_basis.n2(), 1);  // the seed block only
  EXPECT_EQ(dec.v_basis.n1(), 0);  // no V block was produced
  EXPECT_EQ(dec.cbar.rows(), 0);
}

TEST(GolubKahan, ZeroSeedThrows) {
  const Tensor3d a = oracle::random_tensor(4, 3, 2, 468);
  Tensor3d b(4, 1, 2);
  b.setZero();
  EXPECT_THROW(tubal::ttg_golub_kahan(a, b, 2), tubal::BreakdownError);
  EXPECT_THROW(tubal::ttg_golub_kahan(a, oracle::random_tensor(3, 1, 2, 469), 2),
               tubal::ShapeError);
  EXPECT_THROW(tubal::ttg_golub_kahan(a, oracle::random_tensor(4, 1, 2, 470), 0),
               tubal::Error);
}

TEST(TtgkSolve, RecoversConsistentSquareSolution) {
  const Tensor3d a = shifted_random(8, 3, 480, 4.0, 0.5);
  const Tensor3d x_star = oracle::random_tensor(8, 2, 3, 481);
  const Tensor3d b = tubal::tprod(a, x_star);
  const auto [x, rep] = tubal::ttgk_solve(a, b, 40, 1e-10);

  EXPECT_EQ(rep.termination, Termination::converged);
  EXPECT_LT(checks::defect(x, x_star), 1e-6);
  EXPECT_EQ(rep.restarts, 0);
  EXPECT_EQ(Index(rep.history.size()), rep.iterations);
}

TEST(TtgkSolve, FinalEstimateAgreesWithExplicitResidual) {
  const Tensor3d a = shifted_random(9, 4, 482, 4.0, 0.5);
  const Tensor3d b = oracle::random_tensor(9, 1, 4, 483);
  const auto [x, rep] = tubal::ttgk_solve(a, b, 40, 1e-8);
  ASSERT_EQ(rep.termination, Termination::converged);
  ASSERT_FALSE(rep.history.empty());
  EXPECT_NEAR(rep.history.back().relres, rep.relres,
              1e-8 * std::max(1.0, rep.relres));
  EXPECT_NEAR(rep.relres, explicit_relres(a, b, x), 1e-10);
}

TEST(TtgkSolve, OverdeterminedMatchesDenseLeastSquares) {
  const Tensor3d a = oracle::random_tensor(10, 6, 1, 484);
  const Tensor3d b = oracle::random_tensor(10, 1, 1, 485);
  const auto [x, rep] = tubal::ttgk_solve(a, b, 12, 1e-12);

  const double got = tubal::frob_norm(b - tubal::tprod(a, x));
  const double want = oracle::dense_ls_residual(oracle::front_slice(a),
                                                oracle::front_vector(b));
  EXPECT_NEAR(got, want, 1e-8 * std::max(1.0, want));
  EXPECT_EQ(rep.termination, Termination::breakdown);  // subspace exhausted
}

TEST(TtgkSolve, HistoryMatchesDenseGkAtDepthOne) {
  for (std::uint64_t seed : {486u, 487u}) {
    const Tensor3d a = shifted_random(30, 1, seed, 4.0, 0.3);
    const Tensor3d x_star = oracle::random_tensor(30, 1, 1, seed + 100);
    const Tensor3d b = tubal::tprod(a, x_star);
    const auto [x, rep] = tubal::ttgk_solve(a, b, 40, 1e-9);
    const auto dense = oracle::dense_gk_solve(oracle::front_slice(a),
                                              oracle::front_vector(b), 40, 1e-9);

    ASSERT_EQ(rep.history.size(), dense.history.size()) << "seed " << seed;
    for (std::size_t i = 0; i < dense.history.size(); ++i)
      EXPECT_NEAR(rep.history[i].relres, dense.history[i], 1e-8)
          << "seed " << seed << " step " << i;
    EXPECT_EQ(rep.iterations, dense.iterations);
    EXPECT_NEAR(rep.relres, dense.relres, 1e-8);
  }
}

TEST(TtgkSolve, ImmediateBreakdownReturnsZero) {
  Tensor3d a(2, 2, 1);
  a.setZero();
  a(0, 0, 0) = 1.0;
  Tensor3d b(2, 1, 1);
  b.setZero();
  b(1, 0, 0) = 1.0;
  const auto [x, rep] = tubal::ttgk_solve(a, b, 3, 1e-8);
  EXPECT_EQ(rep.termination, Termination::breakdown);
  EXPECT_EQ(rep.iterations, 0);
  EXPECT_TRUE(rep.history.empty());
  EXPECT_EQ(x.flat().norm(), 0.0);
  EXPECT_NEAR(rep.relres, 1.0, 1e-12);
}

TEST(TtgkSolve, RejectsBadArguments) {
  const Tensor3d a = oracle::random_tensor(5, 3, 2, 488);
  Tensor3d zero(5, 1, 2);
  zero.setZero();
  EXPECT_THROW(tubal::ttgk_solve(a, zero, 3, 1e-8), tubal::BreakdownError);
  EXPECT_THROW(tubal::ttgk_solve(a, oracle::random_tensor(4, 1, 2, 489), 3, 1e-8),
               tubal::ShapeError);
  EXPECT_THROW(tubal::ttgk_solve(a, oracle::random_tensor(5, 1, 2, 490), 0, 1e-8),
               tubal::Error);
  EXPECT_THROW(tubal::ttgk_solve(a, oracle::random_tensor(5, 1, 2, 491), 3, -1.0),
               tubal::Error);
}
