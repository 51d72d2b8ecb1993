#pragma once

#include <vector>

#include "randqb/dense.hpp"
#include "randqb/rand_qb.hpp"

namespace rqb {

// Either a fixed rank k, or the smallest k whose discarded tail
// (sum_{j>k} s_j^2)^(1/2) is at most eps.
struct RankRule {
  enum class Kind { fixed, tolerance };
  Kind kind = Kind::fixed;
  std::size_t k = 0;
  double eps = 0.0;

  static RankRule fixed(std::size_t k) { return {Kind::fixed, k, 0.0}; }
  static RankRule tolerance(double eps) { return {Kind::tolerance, 0, eps}; }
};

struct IDFactors {
  std::vector<std::size_t> column_indices;  // J, length k
  Matrix y;                                 // k x n, y(:, J) = I
  double max_abs_y = 0.0;
};

struct CURFactors {
  std::vector<std::size_t> column_indices;
  std::vector<std::size_t> row_indices;
  Matrix u_mid;  // k x k
};

// SVD of B, truncated by the rule, lifted through Q.
SVDFactors qb_to_svd(const QBFactors& qb, const RankRule& rule, Exec exec = Exec::serial);

// Keep the leading k triplets of an SVD.
SVDFactors truncate_svd(const SVDFactors& f, std::size_t k);

// U diag(s) V^T.
Matrix svd_reconstruct(const SVDFactors& f, Exec exec = Exec::serial);

// Column-pivoted QR of B lifted through Q: A(:, pivots) ~= q r.
PivotedQRFactors qb_to_qr(const QBFactors& qb, Exec exec = Exec::serial);

// Column interpolative decomposition A ~= A(:, J) Y from the pivoted QR of B.
IDFactors qb_to_id(const QBFactors& qb, std::size_t k);

// Pivot-based skeletons plus the Frobenius-optimal middle factor C^+ A R^+.
CURFactors qb_to_cur(const QBFactors& qb, const Matrix& a, std::size_t k, Exec exec = Exec::serial);

Matrix id_reconstruct(const Matrix& a, const IDFactors& id, Exec exec = Exec::serial);
Matrix cur_reconstruct(const Matrix& a, const CURFactors& cur, Exec exec = Exec::serial);

}  // namespace rqb
