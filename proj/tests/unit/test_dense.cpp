#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "randqb/dense.hpp"

using rqb::Matrix;

namespace {

Matrix diag_sorted(std::vector<double> d) { return Matrix::diagonal(d); }

bool is_upper(const Matrix& r) {
  for (std::size_t j = 0; j < r.cols(); ++j)
    for (std::size_t i = j + 1; i < r.rows(); ++i)
      if (r(i, j) != 0.0) return false;
  return true;
}

}  // namespace

TEST(HouseholderQR, TwoByOne) {
  const auto f = rqb::householder_qr(Matrix::from_rows({{3}, {4}}));
  EXPECT_NEAR(f.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(f.q(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(f.r(0, 0), 5.0, 1e-14);
}

TEST(HouseholderQR, OrthonormalInputGivesIdentityR) {
  const Matrix a = oracle::gram_schmidt(oracle::random_matrix(50, 8, 21));
  const auto f = rqb::householder_qr(a);
  EXPECT_LE(oracle::fro(oracle::sub(f.r, Matrix::identity(8))), 1e-13);
  EXPECT_LE(oracle::fro(oracle::sub(f.q, a)), 1e-13);
}

TEST(HouseholderQR, RandomReconstruction) {
  const Matrix a = oracle::random_matrix(100, 20, 22);
  for (auto e : {rqb::Exec::serial, rqb::Exec::parallel}) {
    const auto f = rqb::householder_qr(a, e);
    EXPECT_TRUE(is_upper(f.r));
    for (std::size_t j = 0; j < 20; ++j) EXPECT_GE(f.r(j, j), 0.0);
    EXPECT_LE(oracle::orth_defect(f.q), 1e-13);
    EXPECT_LE(oracle::fro(oracle::sub(a, oracle::matmul(f.q, f.r))), 1e-13 * oracle::fro(a));
  }
}

TEST(HouseholderQR, RejectsWideInput) {
  EXPECT_THROW(rqb::householder_qr(Matrix(2, 3)), rqb::ValidationError);
}

TEST(Orth, LeadingIdentityColumns) {
  const Matrix x = Matrix::identity(6).cols_range(0, 3);
  EXPECT_LE(oracle::fro(oracle::sub(rqb::orth(x), x)), 1e-15);
}

TEST(Orth, PreservesSpanOfGaussian) {
  const Matrix x = oracle::random_matrix(200, 10, 23);
  const Matrix q = rqb::orth(x);
  EXPECT_LE(oracle::orth_defect(q), 1e-13);
  EXPECT_LE(oracle::fro(oracle::sub(x, oracle::project(q, x))), 1e-12 * oracle::fro(x));
}

TEST(Orth, DuplicatedColumnIsRankDeficient) {
  Matrix x = oracle::random_matrix(10, 2, 24);
  for (std::size_t i = 0; i < 10; ++i) x(i, 1) = x(i, 0);
  try {
    rqb::orth(x);
    FAIL() << "expected RankDeficient";
  } catch (const rqb::RankDeficient& e) {
    EXPECT_EQ(e.column(), 1u);
  }
  EXPECT_NO_THROW(rqb::orth(x, rqb::RankCheck::none));
}

TEST(Orth, ZeroMatrixIsRankDeficient) {
  EXPECT_THROW(rqb::orth(Matrix(5, 2)), rqb::RankDeficient);
}

TEST(Orth, DefectBoundOverShapes) {
  std::mt19937_64 g(25);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + g() % 40;
    const std::size_t m = n + g() % 100;
    const Matrix q = rqb::orth(oracle::random_matrix(m, n, 100 + t));
    EXPECT_LE(oracle::orth_defect(q), 1e-12 * std::sqrt(static_cast<double>(n))) << m << "x" << n;
  }
}

TEST(PivotedQR, PermutationAndOrdering) {
  const Matrix a = oracle::random_matrix(40, 25, 26);
  const auto f = rqb::pivoted_qr(a);
  std::vector<std::size_t> p = f.pivots;
  std::sort(p.begin(), p.end());
  std::vector<std::size_t> want(25);
  std::iota(want.begin(), want.end(), 0);
  EXPECT_EQ(p, want);
  for (std::size_t j = 1; j < 25; ++j) EXPECT_GE(std::abs(f.r(j - 1, j - 1)), std::abs(f.r(j, j)) * (1 - 1e-12));
  EXPECT_LE(oracle::fro(oracle::sub(a.select_cols(f.pivots), oracle::matmul(f.q, f.r))),
            1e-13 * oracle::fro(a));
}

TEST(PivotedQR, PartialSteps) {
  const Matrix a = oracle::random_matrix(30, 20, 27);
  const auto f = rqb::pivoted_qr(a, 5);
  EXPECT_EQ(f.q.cols(), 5u);
  EXPECT_EQ(f.r.rows(), 5u);
  EXPECT_EQ(f.r.cols(), 20u);
  EXPECT_EQ(f.pivots.size(), 20u);
  EXPECT_LE(oracle::orth_defect(f.q), 1e-13);
}

TEST(JacobiSVD, Diagonal) {
  const auto f = rqb::jacobi_svd(diag_sorted({3, 2, 1}));
  ASSERT_EQ(f.sigma.size(), 3u);
  EXPECT_NEAR(f.sigma[0], 3, 1e-14);
  EXPECT_NEAR(f.sigma[1], 2, 1e-14);
  EXPECT_NEAR(f.sigma[2], 1, 1e-14);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(std::abs(f.u(j, j)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(f.v(j, j)), 1.0, 1e-14);
  }
}

TEST(JacobiSVD, ConstructedFactorization) {
  const Matrix a = oracle::with_singular_values(7, 4, {5, 1}, 28);
  const auto f = rqb::jacobi_svd(a);
  EXPECT_NEAR(f.sigma[0], 5, 1e-12);
  EXPECT_NEAR(f.sigma[1], 1, 1e-12);
  EXPECT_LE(f.sigma[2], 1e-12);
}

TEST(JacobiSVD, RandomReconstruction) {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{60, 40}, {40, 60}, {33, 33}}) {
    const Matrix a = oracle::random_matrix(m, n, 29 + m);
    for (auto e : {rqb::Exec::serial, rqb::Exec::parallel}) {
      rqb::JacobiOptions o;
      o.exec = e;
      const auto f = rqb::jacobi_svd(a, o);
      Matrix us = f.u;
      for (std::size_t j = 0; j < f.k; ++j)
        for (std::size_t i = 0; i < us.rows(); ++i) us(i, j) *= f.sigma[j];
      EXPECT_LE(oracle::fro(oracle::sub(a, oracle::matmul(us, f.v, false, true))), 1e-12 * oracle::fro(a));
      EXPECT_LE(oracle::orth_defect(f.u), 1e-12);
      EXPECT_LE(oracle::orth_defect(f.v), 1e-12);
      for (std::size_t j = 1; j < f.k; ++j) EXPECT_GE(f.sigma[j - 1], f.sigma[j]);
    }
  }
}

TEST(JacobiSVD, ParallelMatchesSerialBitForBit) {
  const Matrix a = oracle::random_matrix(80, 50, 30);
  rqb::JacobiOptions o;
  const auto s = rqb::jacobi_svd(a, o);
  o.exec = rqb::Exec::parallel;
  const auto p = rqb::jacobi_svd(a, o);
  EXPECT_EQ(s.sigma.values(), p.sigma.values());
  EXPECT_EQ(s.u, p.u);
  EXPECT_EQ(s.v, p.v);
}

TEST(JacobiSVD, NormInvariance) {
  const Matrix a = oracle::random_matrix(45, 30, 31);
  const auto f = rqb::jacobi_svd(a);
  long double s = 0;
  for (double x : f.sigma.values()) s += static_cast<long double>(x) * x;
  EXPECT_LE(std::abs(oracle::fro(a) - static_cast<double>(std::sqrt(s))), 1e-12 * oracle::fro(a));
}

TEST(JacobiSVD, EckartYoungTruncation) {
  const Matrix a = oracle::random_matrix(30, 20, 32);
  const auto f = rqb::jacobi_svd(a);
  for (std::size_t k = 0; k <= 20; ++k) {
    Matrix ak(30, 20);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t c = 0; c < 20; ++c)
        for (std::size_t i = 0; i < 30; ++i) ak(i, c) += f.u(i, j) * f.sigma[j] * f.v(c, j);
    const double got = oracle::fro(oracle::sub(a, ak));
    const double want = oracle::tail(f.sigma.values(), k);
    EXPECT_LE(std::abs(got - want), 1e-12 * oracle::fro(a)) << "k=" << k;
  }
}

TEST(JacobiSVD, ValuesOnly) {
  const Matrix a = oracle::random_matrix(50, 30, 33);
  rqb::JacobiOptions o;
  o.compute_u = false;
  o.compute_v = false;
  const auto f = rqb::jacobi_svd(a, o);
  const auto full = rqb::jacobi_svd(a);
  for (std::size_t j = 0; j < 30; ++j) EXPECT_NEAR(f.sigma[j], full.sigma[j], 1e-12 * full.sigma[0]);
}

TEST(JacobiSVD, SweepLimitReportsLastIterate) {
  rqb::JacobiOptions o;
  o.max_sweeps = 1;
  try {
    rqb::jacobi_svd(oracle::random_matrix(40, 30, 34), o);
    FAIL() << "expected ConvergenceError";
  } catch (const rqb::ConvergenceError& e) {
    EXPECT_EQ(e.sweeps(), 1);
    EXPECT_EQ(e.last_iterate().sigma.size(), 30u);
  }
}

TEST(BackSubstitute, Identity) {
  const Matrix b = oracle::random_matrix(4, 3, 35);
  EXPECT_EQ(rqb::back_substitute(Matrix::identity(4), b), b);
}

TEST(BackSubstitute, HandCase) {
  const Matrix x = rqb::back_substitute(Matrix::from_rows({{2, 1}, {0, 4}}), Matrix::from_rows({{4}, {8}}));
  EXPECT_NEAR(x(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(x(1, 0), 2.0, 1e-15);
}

TEST(BackSubstitute, WellConditionedResidual) {
  Matrix r = oracle::random_matrix(15, 15, 36);
  for (std::size_t j = 0; j < 15; ++j) {
    for (std::size_t i = j + 1; i < 15; ++i) r(i, j) = 0.0;
    r(j, j) = 5.0 + std::abs(r(j, j));
  }
  const Matrix b = oracle::random_matrix(15, 4, 37);
  const Matrix x = rqb::back_substitute(r, b);
  EXPECT_LE(oracle::fro(oracle::sub(oracle::matmul(r, x), b)), 1e-12 * oracle::fro(b));
}

TEST(BackSubstitute, NearSingular) {
  EXPECT_THROW(rqb::back_substitute(Matrix::from_rows({{1, 1}, {0, 1e-16}}), Matrix(2, 1)),
               rqb::NearSingular);
}

TEST(SpectralNormEst, Diagonal) {
  const auto e = rqb::spectral_norm_est(diag_sorted({3, 2, 1}));
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.value, 3.0, 1e-10);
}

TEST(SpectralNormEst, RankOne) {
  Matrix u(6, 1), v(5, 1);
  u(0, 0) = 2.0;
  v(3, 0) = 2.0;
  const auto e = rqb::spectral_norm_est(oracle::matmul(u, v, false, true));
  EXPECT_NEAR(e.value, 4.0, 1e-10);
}

TEST(SpectralNormEst, MatchesJacobi) {
  const Matrix a = oracle::random_matrix(50, 40, 38);
  const double s1 = rqb::jacobi_svd(a).sigma[0];
  EXPECT_LE(std::abs(rqb::spectral_norm_est(a).value - s1), 1e-8 * s1);
}

TEST(SpectralNormEst, FlagsNonConvergence) {
  const auto e = rqb::spectral_norm_est(oracle::random_matrix(50, 40, 39), 1e-15, 2);
  EXPECT_FALSE(e.converged);
  EXPECT_EQ(e.iterations, 2u);
}
