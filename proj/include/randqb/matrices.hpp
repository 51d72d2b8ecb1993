#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "randqb/matrix.hpp"
#include "randqb/rng.hpp"

namespace rqb {

enum class Family { fast_decay, slow_decay, sparse, kahan, s_shaped };

// "m1".."m5".
std::string family_id(Family f);
// Accepts "m1".."m5" or the family names above.
Family parse_family(std::string_view s);

struct FamilyParams {
  // fast_decay: d_j = g_j^2 * beta^(j-1), g_j ~ U(0,1]
  double beta = 0.65;
  // slow_decay: d_j = (1 + slow_rate * (j-1))^(-1/2)
  double slow_rate = 200.0;
  // sparse: sum_j w_j x_j y_j^T, w_j = lead_weight/j for j <= lead_count, else 1/j
  double density = 0.01;
  double lead_weight = 2.0;
  std::size_t lead_count = 10;
  // kahan: S K with S = diag(zeta^i), K unit upper with -phi above the diagonal
  double zeta = 0.99;
  bool random_zeta = false;
  double zeta_lo = 0.95;
  double zeta_hi = 0.999;
  // s_shaped: d_j ~ U[top_lo, 1] for j <= knee1, geometric to plateau by knee2, then flat
  std::size_t knee1 = 30;
  std::size_t knee2 = 60;
  double top_lo = 0.9;
  double plateau = 0.0031622776601683794;  // 10^-2.5
  // When positive, A is rescaled so that sigma_1 equals this value.
  double sigma1 = 0.0;
};

struct TestMatrixSpec {
  Family family = Family::fast_decay;
  std::size_t m = 800;
  std::size_t n = 600;
  std::uint64_t seed = 1;
  FamilyParams params;
};

// Standard sizes: 800 x 600, except 1000 x 1000 for kahan.
TestMatrixSpec default_spec(Family f, std::uint64_t seed = 1);

struct GeneratedMatrix {
  Matrix a;
  // Exact singular values for the families built as U diag(d) V^T.
  std::optional<SingularValues> d;
};

GeneratedMatrix gen_test_matrix(const TestMatrixSpec& spec, RngStream& stream);
// Uses a fresh stream seeded with spec.seed.
GeneratedMatrix gen_test_matrix(const TestMatrixSpec& spec);

struct OptimalErrors {
  double fro = 0.0;
  double spec = 0.0;
};

// Best rank-k errors from sorted singular values: spec = d_{k+1}, fro = tail norm.
OptimalErrors optimal_errors(const SingularValues& d, std::size_t k);

// Number of singular values above rel * d_1.
std::size_t numerical_rank(const SingularValues& d, double rel);

enum class MtxFormat { array, coordinate };

// Real general Matrix Market, array or coordinate; duplicates are summed.
Matrix load_matrix_market(const std::string& path);
Matrix parse_matrix_market(std::string_view text);
void write_matrix_market(const std::string& path, const Matrix& a,
                         MtxFormat format = MtxFormat::array);
std::string format_matrix_market(const Matrix& a, MtxFormat format = MtxFormat::array);

}  // namespace rqb
