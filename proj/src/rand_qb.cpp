#include "randqb/rand_qb.hpp"

#include <chrono>
#include <cmath>

namespace rqb {
namespace {

class Stopwatch {
 public:
  explicit Stopwatch(double& sink) : sink_(sink), t0_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    sink_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }
  Stopwatch(const Stopwatch&) = delete;
  Stopwatch& operator=(const Stopwatch&) = delete;

 private:
  double& sink_;
  std::chrono::steady_clock::time_point t0_;
};

void check_input(const char* what, const Matrix& a) {
  if (a.empty()) throw ValidationError(std::string(what) + ": empty input matrix");
  if (!a.all_finite()) throw ValidationError(std::string(what) + ": non-finite input");
}

// c = a * b, timed.
Matrix mm(const Matrix& a, Op ta, const Matrix& b, QBTimings& t, Exec exec) {
  Stopwatch sw(t.matmul_ms);
  Matrix c;
  gemm(1.0, a, ta, b, Op::none, 0.0, c, exec);
  return c;
}

Matrix timed_orth(const Matrix& x, RankCheck check, QBTimings& t, Exec exec) {
  Stopwatch sw(t.orth_ms);
  return orth(x, check, exec);
}

double downdated_residual(double a_norm, const Matrix& b) {
  const double bn = frobenius_norm(b);
  return std::sqrt(std::max(0.0, (a_norm - bn) * (a_norm + bn)));
}

}  // namespace

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::rank_limit: return "rank_limit";
    case StopReason::matrix_exhausted: return "matrix_exhausted";
  }
  return "unknown";
}

QBFactors rand_qb(const Matrix& a, std::size_t ell, RngStream& stream, Exec exec) {
  return rand_qb_p(a, ell, 0, stream, ReorthMode::full, exec);
}

QBFactors rand_qb_p(const Matrix& a, std::size_t ell, std::size_t p, RngStream& stream,
                    ReorthMode mode, Exec exec) {
  check_input("rand_qb_p", a);
  if (ell < 1 || ell > std::min(a.rows(), a.cols())) {
    throw ValidationError("rand_qb_p: ell=" + std::to_string(ell) + " outside [1, min(m,n)] for " +
                          a.shape_string());
  }
  QBFactors out;
  out.block_size = ell;
  out.power = p;
  const Matrix omega = gaussian_matrix(stream, a.cols(), ell);
  Matrix y = mm(a, Op::none, omega, out.timings, exec);
  // Fixed-rank sampling keeps whatever basis Householder produces; rank
  // deficiency of the sample shows up only as an exact (zero-error) fit.
  if (mode == ReorthMode::full) {
    Matrix q = timed_orth(y, RankCheck::none, out.timings, exec);
    for (std::size_t i = 0; i < p; ++i) {
      q = timed_orth(mm(a, Op::trans, q, out.timings, exec), RankCheck::none, out.timings, exec);
      q = timed_orth(mm(a, Op::none, q, out.timings, exec), RankCheck::none, out.timings, exec);
    }
    out.q = std::move(q);
  } else {
    for (std::size_t i = 0; i < p; ++i) {
      y = mm(a, Op::none, mm(a, Op::trans, y, out.timings, exec), out.timings, exec);
    }
    out.q = timed_orth(y, RankCheck::none, out.timings, exec);
  }
  out.b = mm(out.q, Op::trans, a, out.timings, exec);
  out.residual_history.push_back(downdated_residual(frobenius_norm(a), out.b));
  out.stopped_by = StopReason::rank_limit;
  return out;
}

QBFactors rand_qb_b(const Matrix& a, const StopCriterion& stop, std::size_t b, RngStream& stream,
                    bool reproject, Exec exec) {
  return rand_qb_pb(a, stop, 0, b, stream, ReorthMode::full, reproject, exec);
}

QBFactors rand_qb_pb(const Matrix& a, const StopCriterion& stop, std::size_t p, std::size_t b,
                     RngStream& stream, ReorthMode mode, bool reproject, Exec exec) {
  check_input("rand_qb_pb", a);
  Matrix res = a;
  return rand_qb_pb_inplace(res, stop, p, b, stream, mode, reproject, exec);
}

QBFactors rand_qb_pb_inplace(Matrix& a, const StopCriterion& stop, std::size_t p, std::size_t b,
                             RngStream& stream, ReorthMode mode, bool reproject_on, Exec exec) {
  check_input("rand_qb_pb", a);
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t full_rank = std::min(m, n);
  if (b < 1) throw ValidationError("rand_qb_pb: block size must be >= 1");
  if (!(stop.epsilon >= 0.0)) throw ValidationError("rand_qb_pb: epsilon must be >= 0");
  if (stop.max_rank > full_rank) {
    throw ValidationError("rand_qb_pb: max_rank=" + std::to_string(stop.max_rank) +
                          " exceeds min(m,n)=" + std::to_string(full_rank));
  }
  const std::size_t max_rank = stop.max_rank == 0 ? full_rank : stop.max_rank;

  QBFactors out;
  out.block_size = b;
  out.power = p;
  out.q = Matrix(m, 0);
  out.b = Matrix(0, n);
  const double norm0 = frobenius_norm(a);
  const double floor = kExhaustedRel * norm0;
  if (norm0 < stop.epsilon) {
    out.stopped_by = StopReason::tolerance;
    return out;
  }
  if (norm0 == 0.0) {
    out.stopped_by = StopReason::matrix_exhausted;
    return out;
  }

  std::vector<Matrix> b_blocks;
  double residual = norm0;
  out.stopped_by = StopReason::rank_limit;
  try {
    while (out.q.cols() < max_rank) {
      const std::size_t bi = std::min(b, max_rank - out.q.cols());
      const Matrix omega = gaussian_matrix(stream, n, bi);
      Matrix y = mm(a, Op::none, omega, out.timings, exec);
      Matrix qi;
      if (mode == ReorthMode::full || p == 0) {
        qi = timed_orth(y, RankCheck::strict, out.timings, exec);
        for (std::size_t it = 0; it < p; ++it) {
          qi = timed_orth(mm(a, Op::trans, qi, out.timings, exec), RankCheck::none, out.timings, exec);
          qi = timed_orth(mm(a, Op::none, qi, out.timings, exec), RankCheck::none, out.timings, exec);
        }
      } else {
        for (std::size_t it = 0; it < p; ++it) {
          y = mm(a, Op::none, mm(a, Op::trans, y, out.timings, exec), out.timings, exec);
        }
        qi = timed_orth(y, RankCheck::none, out.timings, exec);
      }
      if (reproject_on && out.q.cols() > 0) {
        Stopwatch sw(out.timings.orth_ms);
        qi = reproject(qi, out.q, exec);
      }
      Matrix bi_mat = mm(qi, Op::trans, a, out.timings, exec);
      {
        Stopwatch sw(out.timings.matmul_ms);
        gemm(-1.0, qi, Op::none, bi_mat, Op::none, 1.0, a, exec);
      }
      out.q.append_cols(qi);
      b_blocks.push_back(std::move(bi_mat));
      residual = frobenius_norm(a);
      out.residual_history.push_back(residual);
      if (residual < stop.epsilon) {
        out.stopped_by = StopReason::tolerance;
        break;
      }
      if (residual <= floor) {
        out.stopped_by = StopReason::matrix_exhausted;
        break;
      }
    }
  } catch (const RankDeficient&) {
    if (residual > floor) throw;
    out.stopped_by = StopReason::matrix_exhausted;
  }
  if (!b_blocks.empty()) out.b = Matrix::vstack(b_blocks);
  return out;
}

Matrix reproject(const Matrix& q_new, const Matrix& q_prev, Exec exec) {
  if (q_prev.cols() == 0) return q_new;
  if (q_prev.rows() != q_new.rows()) {
    throw DimensionMismatch("reproject: blocks have " + std::to_string(q_prev.rows()) + " and " +
                            std::to_string(q_new.rows()) + " rows");
  }
  Matrix x = q_new;
  Matrix h;
  gemm(1.0, q_prev, Op::trans, q_new, Op::none, 0.0, h, exec);
  gemm(-1.0, q_prev, Op::none, h, Op::none, 1.0, x, exec);
  auto [q, r] = householder_qr(x, exec);
  const double floor = kOrthRankTol * frobenius_norm(q_new);
  for (std::size_t j = 0; j < r.cols(); ++j) {
    if (!(r(j, j) >= floor) || floor == 0.0) {
      throw RankDeficient("reproject: new block collapsed into previous span at column " +
                              std::to_string(j),
                          j);
    }
  }
  return std::move(q);
}

Matrix reproject(const Matrix& q_new, std::span<const Matrix> prev, Exec exec) {
  if (prev.empty()) return q_new;
  Matrix all(q_new.rows(), 0);
  for (const Matrix& blk : prev) {
    if (blk.rows() != q_new.rows()) {
      throw DimensionMismatch("reproject: previous block is " + blk.shape_string() +
                              ", new block is " + q_new.shape_string());
    }
    all.append_cols(blk);
  }
  return reproject(q_new, all, exec);
}

}  // namespace rqb
