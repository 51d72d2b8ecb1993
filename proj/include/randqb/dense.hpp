#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "randqb/errors.hpp"
#include "randqb/kernels.hpp"
#include "randqb/matrix.hpp"

namespace rqb {

struct QRFactors {
  Matrix q;  // m x n, orthonormal columns
  Matrix r;  // n x n, upper triangular, non-negative diagonal
};

// Thin Householder QR of a tall matrix (rows >= cols).
QRFactors householder_qr(const Matrix& a, Exec exec = Exec::serial);

enum class RankCheck { strict, none };

// Orthonormal basis for the columns of x via Householder QR. With
// RankCheck::strict, a pivot |r_jj| < 1e-12 * ||x||_F raises RankDeficient.
Matrix orth(const Matrix& x, RankCheck check = RankCheck::strict, Exec exec = Exec::serial);

inline constexpr double kOrthRankTol = 1e-12;

// a(:, pivots) = q * r, with q m x t orthonormal, r t x n upper trapezoidal,
// t = min(m, n, max_steps). pivots is a full permutation of 0..n-1.
struct PivotedQRFactors {
  Matrix q;
  Matrix r;
  std::vector<std::size_t> pivots;
};

// Householder QR with column pivoting on the largest remaining column norm.
PivotedQRFactors pivoted_qr(const Matrix& a,
                            std::size_t max_steps = std::numeric_limits<std::size_t>::max());

struct SVDFactors {
  Matrix u;  // m x k
  SingularValues sigma;
  Matrix v;  // n x k
  std::size_t k = 0;
};

struct JacobiOptions {
  double tol = 1e-14;
  int max_sweeps = 30;
  bool compute_u = true;
  bool compute_v = true;
  Exec exec = Exec::serial;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, SVDFactors last, int sweeps)
      : NumericalError(what), last_(std::move(last)), sweeps_(sweeps) {}
  const SVDFactors& last_iterate() const noexcept { return last_; }
  int sweeps() const noexcept { return sweeps_; }

 private:
  SVDFactors last_;
  int sweeps_;
};

// Thin SVD by one-sided Jacobi: a = u diag(s) v^T with k = min(m, n).
// Round-robin pair ordering makes the parallel path bit-identical to serial.
SVDFactors jacobi_svd(const Matrix& a, const JacobiOptions& opts = {});

// Solves r x = b for square upper triangular r. NearSingular when some
// |r_ii| <= 1e-14 * max|r|.
Matrix back_substitute(const Matrix& r, const Matrix& b);

struct NormEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration on a^T a from a seeded Gaussian start.
NormEstimate spectral_norm_est(const Matrix& a, double tol = 1e-10, std::size_t max_iters = 2000,
                               std::uint64_t seed = 0x5eed, Exec exec = Exec::serial);

// max |q^T q - I| in Frobenius norm; used in checks throughout.
double orthonormality_defect(const Matrix& q, Exec exec = Exec::serial);

}  // namespace rqb
