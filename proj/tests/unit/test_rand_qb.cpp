#include <gtest/gtest.h>

#include "oracles.hpp"
#include "randqb/baselines.hpp"
#include "randqb/matrices.hpp"
#include "randqb/postprocess.hpp"
#include "randqb/rand_qb.hpp"

using rqb::Matrix;
using rqb::ReorthMode;
using rqb::RngStream;
using rqb::StopCriterion;
using rqb::StopReason;

namespace {

double qb_error(const Matrix& a, const rqb::QBFactors& f) {
  return oracle::fro(oracle::sub(a, oracle::matmul(f.q, f.b)));
}

void check_invariants(const Matrix& a, const rqb::QBFactors& f) {
  const double ell = static_cast<double>(f.rank());
  EXPECT_LE(oracle::orth_defect(f.q), 1e-10 * std::sqrt(std::max(1.0, ell)));
  if (f.rank() > 0)
    EXPECT_LE(oracle::fro(oracle::sub(f.b, oracle::matmul(f.q, a, true, false))), 1e-10 * oracle::fro(a));
  for (std::size_t i = 1; i < f.residual_history.size(); ++i)
    EXPECT_LE(f.residual_history[i], f.residual_history[i - 1]);
}

Matrix geometric(std::size_t m, std::size_t n, double ratio, std::uint64_t seed) {
  std::vector<double> d(std::min(m, n));
  double s = 1.0;
  for (double& x : d) {
    x = s;
    s *= ratio;
  }
  return oracle::with_singular_values(m, n, d, seed);
}

StopCriterion rank_only(std::size_t r) { return {0.0, r}; }

}  // namespace

TEST(RandQB, RankOneCapturedExactly) {
  const Matrix u = oracle::random_matrix(100, 1, 40), v = oracle::random_matrix(80, 1, 41);
  const Matrix a = oracle::matmul(u, v, false, true);
  RngStream s(1);
  const auto f = rqb::rand_qb(a, 3, s);
  EXPECT_EQ(f.rank(), 3u);
  EXPECT_LE(qb_error(a, f), 1e-12 * oracle::fro(a));
  check_invariants(a, f);
}

TEST(RandQB, FullColumnSpace) {
  const Matrix a = oracle::random_matrix(50, 40, 42);
  RngStream s(2);
  const auto f = rqb::rand_qb(a, 40, s);
  EXPECT_LE(qb_error(a, f), 1e-11 * oracle::fro(a));
}

TEST(RandQB, RejectsBadRank) {
  RngStream s(3);
  const Matrix a = oracle::random_matrix(10, 8, 43);
  EXPECT_THROW(rqb::rand_qb(a, 0, s), rqb::ValidationError);
  EXPECT_THROW(rqb::rand_qb(a, 9, s), rqb::ValidationError);
}

TEST(RandQBP, ZeroPowerIsPlainQB) {
  const Matrix a = oracle::random_matrix(70, 50, 44);
  RngStream s1(5), s2(5);
  const auto f = rqb::rand_qb(a, 20, s1);
  const auto g = rqb::rand_qb_p(a, 20, 0, s2);
  EXPECT_EQ(f.q, g.q);
  EXPECT_EQ(f.b, g.b);
}

TEST(RandQBP, SlowDecayNearOptimal) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::slow_decay));
  RngStream s(6);
  const auto f = rqb::rand_qb_p(gen.a, 110, 2, s);
  const auto svd = rqb::qb_to_svd(f, rqb::RankRule::fixed(100));
  const double err = rqb::frobenius_norm(gen.a - rqb::svd_reconstruct(svd));
  const double opt = rqb::optimal_errors(*gen.d, 100).fro;
  EXPECT_LE(err, 1.05 * opt);
}

TEST(RandQBB, ProjectorMatchesUnblocked) {
  const Matrix a = oracle::random_matrix(200, 150, 45);
  for (std::size_t b : {5, 10, 20}) {
    RngStream s1(7), s2(7);
    const auto f = rqb::rand_qb(a, 60, s1);
    const auto g = rqb::rand_qb_b(a, rank_only(60), b, s2);
    EXPECT_EQ(g.rank(), 60u);
    EXPECT_EQ(g.stopped_by, StopReason::rank_limit);
    const Matrix diff = oracle::sub(oracle::project(f.q, a), oracle::project(g.q, a));
    EXPECT_LE(oracle::fro(diff), 1e-10 * oracle::fro(a)) << "b=" << b;
    check_invariants(a, g);
  }
}

TEST(RandQBB, LooseToleranceStopsOnBlockBoundary) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::fast_decay));
  const double eps = 0.5 * rqb::frobenius_norm(gen.a);
  RngStream s(8);
  const auto f = rqb::rand_qb_b(gen.a, {eps, 0}, 10, s);
  EXPECT_EQ(f.stopped_by, StopReason::tolerance);
  EXPECT_LT(f.residual_history.back(), eps);
  EXPECT_EQ(f.rank() % 10, 0u);
}

TEST(RandQBB, TightToleranceFindsNumericalRank) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::fast_decay));
  RngStream s(9);
  const auto f = rqb::rand_qb_b(gen.a, {1e-14 * rqb::frobenius_norm(gen.a), 0}, 10, s);
  EXPECT_GE(f.rank(), 60u);
  EXPECT_LE(f.rank(), 100u);
  EXPECT_NE(f.stopped_by, StopReason::rank_limit);
}

TEST(RandQBB, ExhaustsLowRankMatrix) {
  const Matrix a = oracle::with_singular_values(60, 50, {3, 2, 1, 0.5, 0.25, 0.1, 0.05}, 46);
  RngStream s(10);
  const auto f = rqb::rand_qb_b(a, {}, 7, s);
  EXPECT_EQ(f.stopped_by, StopReason::matrix_exhausted);
  EXPECT_EQ(f.rank(), 7u);
  EXPECT_LE(qb_error(a, f), 1e-13 * oracle::fro(a));
}

TEST(RandQBB, RankBelowBlockWithResidualLeftIsAnError) {
  const Matrix a = oracle::with_singular_values(60, 50, {3, 2, 1, 0.5, 0.25, 0.1, 0.05}, 46);
  RngStream s(10);
  EXPECT_THROW(rqb::rand_qb_b(a, {}, 5, s), rqb::RankDeficient);
}

TEST(RandQBB, LastBlockNarrowedToMaxRank) {
  const Matrix a = oracle::random_matrix(80, 60, 47);
  RngStream s(11);
  const auto f = rqb::rand_qb_b(a, rank_only(23), 10, s);
  EXPECT_EQ(f.rank(), 23u);
  EXPECT_EQ(f.b.rows(), 23u);
  EXPECT_EQ(f.residual_history.size(), 3u);
}

TEST(RandQBB, ZeroMatrix) {
  RngStream s(12);
  const auto f = rqb::rand_qb_b(Matrix(10, 10), {}, 3, s);
  EXPECT_EQ(f.rank(), 0u);
  EXPECT_EQ(f.stopped_by, StopReason::matrix_exhausted);
}

TEST(RandQBB, ValidatesArguments) {
  const Matrix a = oracle::random_matrix(10, 8, 48);
  RngStream s(13);
  EXPECT_THROW(rqb::rand_qb_b(a, {}, 0, s), rqb::ValidationError);
  EXPECT_THROW(rqb::rand_qb_b(a, {-1.0, 0}, 2, s), rqb::ValidationError);
  EXPECT_THROW(rqb::rand_qb_b(a, rank_only(9), 2, s), rqb::ValidationError);
  Matrix bad = a;
  bad(0, 0) = std::nan("");
  EXPECT_THROW(rqb::rand_qb_b(bad, {}, 2, s), rqb::ValidationError);
}

TEST(RandQBB, ResidualIdentityAfterEveryBlock) {
  const Matrix a0 = geometric(200, 150, 0.93, 49);
  for (std::size_t blocks = 1; blocks <= 8; ++blocks) {
    Matrix res = a0;
    RngStream s(14);
    const auto f = rqb::rand_qb_pb_inplace(res, rank_only(blocks * 8), 0, 8, s);
    const Matrix want = oracle::sub(a0, oracle::project(f.q, a0));
    EXPECT_LE(oracle::fro(oracle::sub(res, want)), 1e-10 * oracle::fro(a0)) << blocks;
    EXPECT_DOUBLE_EQ(f.residual_history.back(), rqb::frobenius_norm(res));
  }
}

TEST(RandQBB, PythagoreanDowndate) {
  const Matrix a = oracle::random_matrix(120, 90, 50);
  RngStream s(15);
  const auto f = rqb::rand_qb_b(a, rank_only(60), 10, s);
  double prev = oracle::fro(a);
  for (std::size_t i = 0; i < f.residual_history.size(); ++i) {
    const double bn = oracle::fro(f.b.rows_range(i * 10, 10));
    const double want = prev * prev - bn * bn;
    const double got = f.residual_history[i] * f.residual_history[i];
    EXPECT_LE(std::abs(got - want), 1e-8 * prev * prev);
    prev = f.residual_history[i];
  }
}

TEST(RandQBB, RangeOfSamples) {
  const Matrix a = geometric(150, 120, 0.9, 51);
  RngStream s(16), replay(16);
  const auto f = rqb::rand_qb_b(a, rank_only(40), 10, s);
  // The same stream, drawn in one piece, reproduces the concatenated panels.
  const Matrix omega = rqb::gaussian_matrix(replay, 120, 40);
  const Matrix y = oracle::matmul(a, omega);
  EXPECT_LE(oracle::fro(oracle::sub(y, oracle::project(f.q, y))), 1e-10 * oracle::fro(y));
}

TEST(RandQBB, OrthonormalAtLargeRank) {
  const Matrix a = geometric(400, 320, 0.97, 52);
  RngStream s(17);
  const auto f = rqb::rand_qb_b(a, rank_only(300), 10, s);
  ASSERT_EQ(f.rank(), 300u);
  EXPECT_LE(rqb::orthonormality_defect(f.q), 1e-11 * std::sqrt(300.0));
}

TEST(RandQBB, StrictlyDecreasingAboveTolerance) {
  const Matrix a = oracle::random_matrix(90, 70, 53);
  RngStream s(18);
  const auto f = rqb::rand_qb_b(a, rank_only(60), 6, s);
  for (std::size_t i = 1; i < f.residual_history.size(); ++i)
    EXPECT_LT(f.residual_history[i], f.residual_history[i - 1]);
}

TEST(RandQBPB, ZeroPowerIsBlocked) {
  const Matrix a = oracle::random_matrix(90, 70, 54);
  RngStream s1(19), s2(19);
  const auto f = rqb::rand_qb_b(a, rank_only(35), 10, s1);
  const auto g = rqb::rand_qb_pb(a, rank_only(35), 0, 10, s2);
  EXPECT_EQ(f.q, g.q);
  EXPECT_EQ(f.b, g.b);
  EXPECT_EQ(f.residual_history, g.residual_history);
}

TEST(RandQBPB, PowerInvariants) {
  const Matrix a = geometric(150, 100, 0.9, 55);
  for (auto mode : {ReorthMode::full, ReorthMode::none}) {
    RngStream s(20);
    const auto f = rqb::rand_qb_pb(a, rank_only(50), 2, 10, s, mode);
    check_invariants(a, f);
    EXPECT_EQ(f.power, 2u);
  }
}

TEST(RandQBPB, KahanBeatsPivotedQR) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::kahan));
  RngStream s(21);
  const auto f = rqb::rand_qb_pb(gen.a, rank_only(100), 1, 20, s);
  const auto c = rqb::cpqr_partial(gen.a, 100);
  const double qb_err = f.residual_history.back();
  const double qr_err = rqb::frobenius_norm(gen.a.select_cols(c.pivots) - rqb::matmul(c.q, c.r));
  EXPECT_LE(qb_err, qr_err);
}

TEST(RandQBPB, SkipReorthBlockedReachesFullPrecision) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::fast_decay));
  RngStream s(22);
  const double nrm = rqb::frobenius_norm(gen.a);
  const auto f = rqb::rand_qb_pb(gen.a, {1e-12 * nrm, 0}, 1, 10, s, ReorthMode::none);
  EXPECT_LE(f.residual_history.back(), 1e-12 * nrm);
}

TEST(RandQBPB, SkipReorthResilientWithModestBlockRange) {
  // Ratio 0.5 per index keeps each 10-wide block within a 512x dynamic range.
  const Matrix a = geometric(200, 150, 0.5, 56);
  RngStream s1(23), s2(23);
  const auto full = rqb::rand_qb_pb(a, rank_only(40), 1, 10, s1, ReorthMode::full);
  const auto none = rqb::rand_qb_pb(a, rank_only(40), 1, 10, s2, ReorthMode::none);
  EXPECT_LE(qb_error(a, none), 100.0 * qb_error(a, full) + 1e-15 * oracle::fro(a));
}

TEST(Reproject, EmptyPreviousIsIdentity) {
  const Matrix q = oracle::random_matrix(20, 3, 57);
  EXPECT_EQ(rqb::reproject(q, std::span<const Matrix>{}), q);
}

TEST(Reproject, AlreadyOrthogonal) {
  const Matrix basis = oracle::gram_schmidt(oracle::random_matrix(30, 8, 58));
  const std::vector<Matrix> prev{basis.cols_range(0, 3), basis.cols_range(3, 2)};
  const Matrix q_new = basis.cols_range(5, 3);
  const Matrix out = rqb::reproject(q_new, prev);
  for (const Matrix& p : prev) EXPECT_LE(oracle::fro(oracle::matmul(p, out, true, false)), 1e-13);
  EXPECT_LE(oracle::fro(oracle::sub(q_new, oracle::project(out, q_new))), 1e-13);
}

TEST(Reproject, CollapseIsRankDeficient) {
  const Matrix q1 = oracle::gram_schmidt(oracle::random_matrix(30, 4, 59));
  const std::vector<Matrix> prev{q1};
  EXPECT_THROW(rqb::reproject(q1, prev), rqb::RankDeficient);
}

TEST(Reproject, RowMismatch) {
  const std::vector<Matrix> prev{Matrix(5, 2)};
  EXPECT_THROW(rqb::reproject(Matrix(6, 1), prev), rqb::DimensionMismatch);
}

TEST(RandQB, ParallelMatchesSerial) {
  const Matrix a = oracle::random_matrix(160, 120, 60);
  RngStream s1(24), s2(24);
  const auto f = rqb::rand_qb_pb(a, rank_only(40), 1, 10, s1);
  const auto g = rqb::rand_qb_pb(a, rank_only(40), 1, 10, s2, ReorthMode::full, true, rqb::Exec::parallel);
  EXPECT_EQ(f.q, g.q);
  EXPECT_EQ(f.b, g.b);
}
