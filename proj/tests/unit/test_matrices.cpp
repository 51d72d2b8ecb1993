#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "oracles.hpp"
#include "randqb/baselines.hpp"
#include "randqb/errors.hpp"
#include "randqb/matrices.hpp"

using rqb::Family;
using rqb::Matrix;

namespace {

void check_known_spectrum(Family f) {
  auto spec = rqb::default_spec(f);
  spec.m = 160;
  spec.n = 120;
  const auto gen = rqb::gen_test_matrix(spec);
  ASSERT_TRUE(gen.d.has_value());
  ASSERT_EQ(gen.a.rows(), 160u);
  ASSERT_EQ(gen.a.cols(), 120u);
  const auto sv = rqb::singular_values(gen.a);
  const auto& d = gen.d->values();
  ASSERT_EQ(sv.size(), d.size());
  for (std::size_t j = 0; j < d.size(); ++j) EXPECT_LE(std::abs(sv[j] - d[j]), 1e-10 * d[0]) << j;
}

}  // namespace

TEST(Families, IdsRoundTrip) {
  for (Family f : {Family::fast_decay, Family::slow_decay, Family::sparse, Family::kahan, Family::s_shaped})
    EXPECT_EQ(rqb::parse_family(rqb::family_id(f)), f);
  EXPECT_EQ(rqb::parse_family("kahan"), Family::kahan);
  EXPECT_THROW(rqb::parse_family("m6"), rqb::ValidationError);
}

TEST(Families, DefaultShapes) {
  EXPECT_EQ(rqb::default_spec(Family::kahan).m, 1000u);
  EXPECT_EQ(rqb::default_spec(Family::sparse).n, 600u);
}

TEST(Families, FastDecaySpectrum) { check_known_spectrum(Family::fast_decay); }
TEST(Families, SlowDecaySpectrum) { check_known_spectrum(Family::slow_decay); }
TEST(Families, SShapedSpectrum) { check_known_spectrum(Family::s_shaped); }

TEST(Families, FastDecayNumericalRank) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(Family::fast_decay));
  const auto r = rqb::numerical_rank(*gen.d, 1e-15);
  EXPECT_GE(r, 60u);
  EXPECT_LE(r, 100u);
}

TEST(Families, SlowDecayIsDecreasing) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(Family::slow_decay));
  const auto& d = gen.d->values();
  EXPECT_EQ(d[0], 1.0);
  EXPECT_NEAR(d[1], 1.0 / std::sqrt(201.0), 1e-15);
}

TEST(Families, SparseNonzeroFraction) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(Family::sparse));
  EXPECT_FALSE(gen.d.has_value());
  const auto nnz = std::count_if(gen.a.data().begin(), gen.a.data().end(), [](double x) { return x != 0.0; });
  const double frac = static_cast<double>(nnz) / static_cast<double>(gen.a.size());
  EXPECT_GE(frac, 0.02);
  EXPECT_LE(frac, 0.12);
}

TEST(Families, KahanStructure) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(Family::kahan));
  const Matrix& a = gen.a;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i) ASSERT_EQ(a(i, j), 0.0);
  const auto sv = rqb::singular_values(a.block(0, 0, 20, 20));
  EXPECT_GT(sv[19], 0.0);
  // Column norms stay similar, which is what defeats pivoting.
  std::vector<double> norms(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) norms[j] = rqb::norm2(a.col(j));
  for (std::size_t j = 1; j < norms.size(); ++j) EXPECT_LE(norms[j], 1.05 * norms[j - 1]);
}

TEST(Families, KahanRandomZetaInRange) {
  auto spec = rqb::default_spec(Family::kahan);
  spec.m = spec.n = 50;
  spec.params.random_zeta = true;
  const auto gen = rqb::gen_test_matrix(spec);
  const double zeta = gen.a(1, 1);
  EXPECT_GE(zeta, 0.95);
  EXPECT_LE(zeta, 0.999);
}

TEST(Families, Deterministic) {
  for (Family f : {Family::fast_decay, Family::sparse, Family::kahan}) {
    auto spec = rqb::default_spec(f, 77);
    spec.m = 90;
    spec.n = 70;
    EXPECT_EQ(rqb::gen_test_matrix(spec).a, rqb::gen_test_matrix(spec).a);
  }
}

TEST(Families, SigmaRescale) {
  auto spec = rqb::default_spec(Family::fast_decay);
  spec.m = 100;
  spec.n = 80;
  spec.params.sigma1 = 1.0;
  const auto gen = rqb::gen_test_matrix(spec);
  EXPECT_NEAR(gen.d->values()[0], 1.0, 1e-15);
  EXPECT_NEAR(rqb::spectral_norm_est(gen.a).value, 1.0, 1e-9);
}

TEST(Families, InvalidParams) {
  auto spec = rqb::default_spec(Family::sparse);
  spec.params.density = 0.0;
  EXPECT_THROW(rqb::gen_test_matrix(spec), rqb::ValidationError);
  auto k = rqb::default_spec(Family::kahan);
  k.params.zeta = 1.5;
  EXPECT_THROW(rqb::gen_test_matrix(k), rqb::ValidationError);
}

TEST(OptimalErrors, SmallCases) {
  const rqb::SingularValues d({3, 2, 1});
  auto e = rqb::optimal_errors(d, 2);
  EXPECT_DOUBLE_EQ(e.fro, 1.0);
  EXPECT_DOUBLE_EQ(e.spec, 1.0);
  e = rqb::optimal_errors(d, 0);
  EXPECT_DOUBLE_EQ(e.fro, std::sqrt(14.0));
  EXPECT_DOUBLE_EQ(e.spec, 3.0);
}

TEST(OptimalErrors, SlowDecayMatchesOracle) {
  const auto gen = rqb::gen_test_matrix(rqb::default_spec(Family::slow_decay));
  const auto f = rqb::truncated_svd_oracle(gen.a, 100);
  const Matrix ak = rqb::matmul(rqb::matmul(f.u, Matrix::diagonal(f.sigma.values())), f.v, rqb::Op::none,
                                rqb::Op::trans);
  const auto e = rqb::optimal_errors(*gen.d, 100);
  EXPECT_LE(std::abs(rqb::frobenius_norm(gen.a - ak) - e.fro), 1e-9 * e.fro);
}

TEST(MatrixMarket, ArrayFormat) {
  const Matrix a = rqb::parse_matrix_market(
      "%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n2\n3\n4\n");
  EXPECT_EQ(a, Matrix::from_rows({{1, 3}, {2, 4}}));
}

TEST(MatrixMarket, CoordinateFormat) {
  const Matrix a = rqb::parse_matrix_market("%%MatrixMarket matrix coordinate real general\n3 3 1\n1 1 5.0\n");
  Matrix want(3, 3);
  want(0, 0) = 5.0;
  EXPECT_EQ(a, want);
}

TEST(MatrixMarket, DuplicatesSummed) {
  const Matrix a =
      rqb::parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n2 1 1.5\n2 1 2.5\n");
  EXPECT_EQ(a(1, 0), 4.0);
}

TEST(MatrixMarket, RoundTripBitEqual) {
  const Matrix a = oracle::random_matrix(10, 8, 3);
  const auto dir = std::filesystem::temp_directory_path() / "randqb_mtx_test";
  std::filesystem::create_directories(dir);
  for (auto fmt : {rqb::MtxFormat::array, rqb::MtxFormat::coordinate}) {
    const auto path = (dir / "a.mtx").string();
    rqb::write_matrix_market(path, a, fmt);
    EXPECT_EQ(rqb::load_matrix_market(path), a);
  }
  std::filesystem::remove_all(dir);
}

TEST(MatrixMarket, Errors) {
  EXPECT_THROW(rqb::parse_matrix_market("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n"),
               rqb::ValidationError);
  EXPECT_THROW(rqb::parse_matrix_market("%%MatrixMarket matrix array complex general\n1 1\n1 0\n"),
               rqb::ValidationError);
  try {
    rqb::parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n");
    FAIL() << "expected ParseError";
  } catch (const rqb::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(rqb::parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"),
               rqb::ParseError);
  EXPECT_THROW(rqb::load_matrix_market("/nonexistent/x.mtx"), rqb::Error);
}
