#pragma once

#include <span>
#include <vector>

#include "randqb/dense.hpp"
#include "randqb/rng.hpp"

namespace rqb {

enum class StopReason { tolerance, rank_limit, matrix_exhausted };
enum class ReorthMode { full, none };

const char* to_string(StopReason r) noexcept;

// A residual at or below this fraction of ||A||_F counts as exhausted.
inline constexpr double kExhaustedRel = 1e-14;

struct StopCriterion {
  double epsilon = 0.0;       // absolute Frobenius tolerance; 0 disables
  std::size_t max_rank = 0;   // 0 means min(m, n)
};

struct QBTimings {
  double matmul_ms = 0.0;
  double orth_ms = 0.0;
};

struct QBFactors {
  Matrix q;  // m x l, orthonormal
  Matrix b;  // l x n
  std::size_t block_size = 0;
  std::size_t power = 0;
  std::vector<double> residual_history;
  StopReason stopped_by = StopReason::rank_limit;
  QBTimings timings;

  std::size_t rank() const noexcept { return q.cols(); }
};

// Fixed-rank range finder: Q = orth(A * Omega), B = Q^T A.
QBFactors rand_qb(const Matrix& a, std::size_t ell, RngStream& stream, Exec exec = Exec::serial);

// Fixed-rank power scheme. With ReorthMode::none the intermediate
// orthonormalizations are skipped and only the final one is done.
QBFactors rand_qb_p(const Matrix& a, std::size_t ell, std::size_t p, RngStream& stream,
                    ReorthMode mode = ReorthMode::full, Exec exec = Exec::serial);

// Blocked adaptive range finder; stops on tolerance, max_rank, or exhaustion.
QBFactors rand_qb_b(const Matrix& a, const StopCriterion& stop, std::size_t b, RngStream& stream,
                    bool reproject = true, Exec exec = Exec::serial);

// Blocked adaptive power scheme applied to the current residual.
QBFactors rand_qb_pb(const Matrix& a, const StopCriterion& stop, std::size_t p, std::size_t b,
                     RngStream& stream, ReorthMode mode = ReorthMode::full, bool reproject = true,
                     Exec exec = Exec::serial);

// As rand_qb_pb, but a is overwritten with the final residual A - QB.
QBFactors rand_qb_pb_inplace(Matrix& a, const StopCriterion& stop, std::size_t p, std::size_t b,
                             RngStream& stream, ReorthMode mode = ReorthMode::full,
                             bool reproject = true, Exec exec = Exec::serial);

// orth(q_new - sum_j Q_j Q_j^T q_new). Returns q_new unchanged when prev is empty.
// RankDeficient when q_new has (nearly) collapsed into the previous span.
Matrix reproject(const Matrix& q_new, std::span<const Matrix> prev, Exec exec = Exec::serial);

// Same, against the columns of one concatenated basis.
Matrix reproject(const Matrix& q_new, const Matrix& q_prev, Exec exec = Exec::serial);

}  // namespace rqb
