#include <gtest/gtest.h>

#include "oracles.hpp"
#include "randqb/baselines.hpp"
#include "randqb/matrices.hpp"

using rqb::Matrix;
using rqb::RngStream;

namespace {

double cpqr_error(const Matrix& a, const rqb::PivotedQRFactors& f) {
  return oracle::fro(oracle::sub(a.select_cols(f.pivots), oracle::matmul(f.q, f.r)));
}

}  // namespace

TEST(CPQR, Identity) {
  const Matrix a = Matrix::identity(5);
  const auto f = rqb::cpqr_partial(a, 5);
  EXPECT_EQ(cpqr_error(a, f), 0.0);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(std::abs(f.r(j, j)), 1.0, 1e-15);
}

TEST(CPQR, SparseFamilyCloseToOptimal) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::sparse));
  const auto sv = rqb::singular_values(gen.a);
  const auto f = rqb::cpqr_partial(gen.a, 60);
  for (std::size_t k = 10; k <= 60; k += 10) {
    rqb::PivotedQRFactors t{f.q.cols_range(0, k), f.r.rows_range(0, k), f.pivots};
    EXPECT_LE(cpqr_error(gen.a, t), 1.5 * rqb::optimal_errors(sv, k).fro) << k;
  }
}

TEST(CPQR, KahanFarFromOptimal) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::kahan));
  const auto sv = rqb::singular_values(gen.a);
  const auto f = rqb::cpqr_partial(gen.a, 200);
  // Measured in the spectral norm, where the gap is widest.
  double worst = 0;
  for (std::size_t k = 50; k <= 200; k += 50) {
    const Matrix e = gen.a.select_cols(f.pivots) - rqb::matmul(f.q.cols_range(0, k), f.r.rows_range(0, k));
    worst = std::max(worst, rqb::spectral_norm_est(e).value / rqb::optimal_errors(sv, k).spec);
  }
  EXPECT_GE(worst, 5.0);
}

TEST(CPQR, OrthonormalAtLargeRank) {
  const Matrix a = oracle::random_matrix(400, 350, 1);
  const auto f = rqb::cpqr_partial(a, 300);
  EXPECT_LE(rqb::orthonormality_defect(f.q), 1e-11 * std::sqrt(300.0));
}

TEST(CPQR, EarlyReturnOnExactRank) {
  Matrix a(30, 20);
  a(0, 3) = 1;
  a(1, 7) = 2;
  a(2, 11) = 3;
  const auto f = rqb::cpqr_partial(a, 10);
  EXPECT_EQ(f.q.cols(), 3u);
  EXPECT_EQ(f.pivots[0], 11u);
  EXPECT_EQ(cpqr_error(a, f), 0.0);
}

TEST(CPQR, RejectsRankAboveShape) {
  EXPECT_THROW(rqb::cpqr_partial(Matrix(4, 3), 4), rqb::ValidationError);
}

TEST(Greedy, RankOne) {
  const Matrix a = oracle::matmul(oracle::random_matrix(30, 1, 3), oracle::random_matrix(20, 1, 4), false, true);
  RngStream s(1);
  const auto f = rqb::greedy_rand_single(a, 1, 0, s);
  EXPECT_LE(oracle::fro(oracle::sub(a, oracle::matmul(f.q, f.b))), 1e-12 * oracle::fro(a));
}

TEST(Greedy, MatchesUnitBlockScheme) {
  const Matrix a = oracle::with_singular_values(80, 60, [] {
    std::vector<double> d(60);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = std::pow(0.9, static_cast<double>(j));
    return d;
  }(), 5);
  for (std::size_t p : {0, 1}) {
    RngStream s1(2), s2(2);
    const auto g = rqb::greedy_rand_single(a, 25, p, s1);
    const auto b = rqb::rand_qb_pb(a, {0.0, 25}, p, 1, s2);
    ASSERT_EQ(g.rank(), b.rank());
    for (std::size_t k = 1; k <= 25; ++k) {
      const Matrix qg = g.q.cols_range(0, k), qb = b.q.cols_range(0, k);
      const double eg = oracle::fro(oracle::sub(a, oracle::project(qg, a)));
      const double eb = oracle::fro(oracle::sub(a, oracle::project(qb, a)));
      EXPECT_LE(std::abs(eg - eb), 1e-9) << "p=" << p << " k=" << k;
    }
  }
}

TEST(Greedy, SShapedMatchesBlocked) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::s_shaped));
  RngStream s1(3), s2(3);
  const auto g = rqb::greedy_rand_single(gen.a, 80, 1, s1);
  const auto b = rqb::rand_qb_pb(gen.a, {0.0, 80}, 1, 10, s2);
  for (std::size_t k = 20; k <= 80; k += 20) {
    const double eg = rqb::frobenius_norm(gen.a - rqb::matmul(g.q.cols_range(0, k), g.b.rows_range(0, k)));
    const double eb = rqb::frobenius_norm(gen.a - rqb::matmul(b.q.cols_range(0, k), b.b.rows_range(0, k)));
    EXPECT_LE(std::abs(eg - eb), 0.1 * eb) << k;
  }
}

TEST(Greedy, StopsWhenExhausted) {
  const Matrix a = oracle::with_singular_values(30, 25, {2, 1}, 6);
  RngStream s(4);
  const auto f = rqb::greedy_rand_single(a, 10, 1, s);
  EXPECT_EQ(f.stopped_by, rqb::StopReason::matrix_exhausted);
  EXPECT_LE(f.rank(), 3u);
}

TEST(SVDOracle, DiagonalErrors) {
  const Matrix a = Matrix::diagonal(std::vector<double>{3, 2, 1});
  const auto f = rqb::truncated_svd_oracle(a, 2);
  const Matrix e = oracle::sub(a, rqb::matmul(rqb::matmul(f.u, Matrix::diagonal(f.sigma.values())), f.v,
                                              rqb::Op::none, rqb::Op::trans));
  EXPECT_NEAR(oracle::fro(e), 1.0, 1e-14);
  EXPECT_NEAR(rqb::spectral_norm_est(e).value, 1.0, 1e-10);
}

TEST(SVDOracle, FastDecayTail) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(rqb::Family::fast_decay));
  const auto f = rqb::truncated_svd_oracle(gen.a, 40);
  const Matrix ak = rqb::matmul(rqb::matmul(f.u, Matrix::diagonal(f.sigma.values())), f.v, rqb::Op::none,
                                rqb::Op::trans);
  const double want = rqb::optimal_errors(*gen.d, 40).fro;
  EXPECT_LE(std::abs(rqb::frobenius_norm(gen.a - ak) - want), 1e-10 * want);
}

TEST(SVDOracle, FullRankIsExact) {
  const Matrix a = oracle::random_matrix(25, 18, 7);
  const auto f = rqb::truncated_svd_oracle(a, 18);
  const Matrix ak = rqb::matmul(rqb::matmul(f.u, Matrix::diagonal(f.sigma.values())), f.v, rqb::Op::none,
                                rqb::Op::trans);
  EXPECT_LE(oracle::fro(oracle::sub(a, ak)), 1e-12 * oracle::fro(a));
}

TEST(SVDOracle, NoWorseThanOtherMethods) {
  const Matrix a = oracle::random_matrix(60, 50, 8);
  const auto sv = rqb::singular_values(a);
  const auto c = rqb::cpqr_partial(a, 30);
  RngStream s(5);
  const auto q = rqb::rand_qb_pb(a, {0.0, 30}, 1, 10, s);
  for (std::size_t k = 5; k <= 30; k += 5) {
    const double opt = rqb::optimal_errors(sv, k).fro;
    rqb::PivotedQRFactors t{c.q.cols_range(0, k), c.r.rows_range(0, k), c.pivots};
    EXPECT_GE(cpqr_error(a, t), opt - 1e-12);
    const double eq = oracle::fro(oracle::sub(a, oracle::project(q.q.cols_range(0, k), a)));
    EXPECT_GE(eq, opt - 1e-12);
  }
}
