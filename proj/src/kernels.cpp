#include "randqb/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "randqb/errors.hpp"

namespace rqb {
namespace {

constexpr std::size_t kColBlock = 4;
constexpr std::size_t kRowChunk = 256;

// One output tile of c = alpha*a*b + beta*c: rows [r0, r1), cols [j0, j0+nb).
void nn_tile(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c,
             std::size_t r0, std::size_t r1, std::size_t j0, std::size_t nb) {
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t len = r1 - r0;
  const double* ad = a.data().data();
  double* cd = c.data().data();

  for (std::size_t jj = 0; jj < nb; ++jj) {
    double* cj = cd + (j0 + jj) * m + r0;
    if (beta == 0.0) {
      std::fill(cj, cj + len, 0.0);
    } else if (beta != 1.0) {
      for (std::size_t i = 0; i < len; ++i) cj[i] *= beta;
    }
  }

  if (nb == kColBlock) {
    double* c0 = cd + j0 * m + r0;
    double* c1 = c0 + m;
    double* c2 = c1 + m;
    double* c3 = c2 + m;
    for (std::size_t p = 0; p < k; ++p) {
      const double b0 = alpha * b(p, j0);
      const double b1 = alpha * b(p, j0 + 1);
      const double b2 = alpha * b(p, j0 + 2);
      const double b3 = alpha * b(p, j0 + 3);
      const double* ap = ad + p * m + r0;
#pragma omp simd
      for (std::size_t i = 0; i < len; ++i) {
        const double av = ap[i];
        c0[i] += av * b0;
        c1[i] += av * b1;
        c2[i] += av * b2;
        c3[i] += av * b3;
      }
    }
    return;
  }
  for (std::size_t jj = 0; jj < nb; ++jj) {
    double* cj = cd + (j0 + jj) * m + r0;
    for (std::size_t p = 0; p < k; ++p) {
      const double bv = alpha * b(p, j0 + jj);
      const double* ap = ad + p * m + r0;
#pragma omp simd
      for (std::size_t i = 0; i < len; ++i) cj[i] += ap[i] * bv;
    }
  }
}

double dot_kernel(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
#pragma omp simd reduction(+ : s)
  for (std::size_t r = 0; r < n; ++r) s += x[r] * y[r];
  return s;
}

// Four dot products against a shared vector x.
void dot4_kernel(const double* x, const double* y0, const double* y1, const double* y2,
                 const double* y3, std::size_t n, double out[4]) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
#pragma omp simd reduction(+ : s0, s1, s2, s3)
  for (std::size_t r = 0; r < n; ++r) {
    const double xv = x[r];
    s0 += xv * y0[r];
    s1 += xv * y1[r];
    s2 += xv * y2[r];
    s3 += xv * y3[r];
  }
  out[0] = s0;
  out[1] = s1;
  out[2] = s2;
  out[3] = s3;
}

inline void store(Matrix& c, std::size_t i, std::size_t j, double alpha, double beta, double s) {
  c(i, j) = beta == 0.0 ? alpha * s : beta * c(i, j) + alpha * s;
}

// One outer block of c = alpha * a^T b + beta * c. The operand with more columns
// drives the outer loop so it is streamed from memory once.
void tn_outer_block(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c,
                    std::size_t blk) {
  const std::size_t m = a.rows();
  const bool outer_a = a.cols() >= b.cols();
  const Matrix& outer = outer_a ? a : b;
  const Matrix& inner = outer_a ? b : a;
  const std::size_t o0 = blk * kColBlock;
  const std::size_t no = std::min(kColBlock, outer.cols() - o0);
  auto put = [&](std::size_t o, std::size_t in, double s) {
    if (outer_a) {
      store(c, o, in, alpha, beta, s);
    } else {
      store(c, in, o, alpha, beta, s);
    }
  };
  for (std::size_t in = 0; in < inner.cols(); ++in) {
    const double* x = inner.col(in).data();
    if (no == kColBlock) {
      double s[4];
      dot4_kernel(x, outer.col(o0).data(), outer.col(o0 + 1).data(), outer.col(o0 + 2).data(),
                  outer.col(o0 + 3).data(), m, s);
      for (std::size_t t = 0; t < kColBlock; ++t) put(o0 + t, in, s[t]);
    } else {
      for (std::size_t t = 0; t < no; ++t) put(o0 + t, in, dot_kernel(x, outer.col(o0 + t).data(), m));
    }
  }
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

void prepare_output(const char* what, std::size_t rows, std::size_t cols, double beta, Matrix& c) {
  if (beta == 0.0) {
    if (c.rows() != rows || c.cols() != cols) c = Matrix(rows, cols);
  } else if (c.rows() != rows || c.cols() != cols) {
    throw DimensionMismatch(std::string(what) + ": output is " + c.shape_string() + ", expected " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void check_inner(const char* what, std::size_t ka, std::size_t kb, const Matrix& a,
                 const Matrix& b) {
  if (ka != kb) {
    throw DimensionMismatch(std::string(what) + ": inner dimensions differ (" + a.shape_string() +
                            " and " + b.shape_string() + ")");
  }
}

}  // namespace

namespace kernels::serial {

void gemm_nn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c) {
  check_inner("gemm_nn", a.cols(), b.rows(), a, b);
  prepare_output("gemm_nn", a.rows(), b.cols(), beta, c);
  const std::size_t m = a.rows();
  const std::size_t n = b.cols();
  for (std::size_t j0 = 0; j0 < n; j0 += kColBlock) {
    const std::size_t nb = std::min(kColBlock, n - j0);
    for (std::size_t r0 = 0; r0 < m; r0 += kRowChunk) {
      nn_tile(alpha, a, b, beta, c, r0, std::min(m, r0 + kRowChunk), j0, nb);
    }
  }
}

void gemm_tn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c) {
  check_inner("gemm_tn", a.rows(), b.rows(), a, b);
  prepare_output("gemm_tn", a.cols(), b.cols(), beta, c);
  const std::size_t nblk = ceil_div(std::max(a.cols(), b.cols()), kColBlock);
  if (a.cols() == 0 || b.cols() == 0) return;
  for (std::size_t blk = 0; blk < nblk; ++blk) tn_outer_block(alpha, a, b, beta, c, blk);
}

}  // namespace kernels::serial

namespace kernels::omp {

void gemm_nn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c) {
  check_inner("gemm_nn", a.cols(), b.rows(), a, b);
  prepare_output("gemm_nn", a.rows(), b.cols(), beta, c);
  const std::size_t m = a.rows();
  const std::size_t n = b.cols();
  const std::size_t ncb = ceil_div(n, kColBlock);
  const std::size_t nrc = ceil_div(m, kRowChunk);
  const std::size_t tiles = ncb * nrc;
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < tiles; ++t) {
    const std::size_t j0 = (t / nrc) * kColBlock;
    const std::size_t r0 = (t % nrc) * kRowChunk;
    nn_tile(alpha, a, b, beta, c, r0, std::min(m, r0 + kRowChunk), j0, std::min(kColBlock, n - j0));
  }
}

void gemm_tn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c) {
  check_inner("gemm_tn", a.rows(), b.rows(), a, b);
  prepare_output("gemm_tn", a.cols(), b.cols(), beta, c);
  if (a.cols() == 0 || b.cols() == 0) return;
  const std::size_t nblk = ceil_div(std::max(a.cols(), b.cols()), kColBlock);
#pragma omp parallel for schedule(static)
  for (std::size_t blk = 0; blk < nblk; ++blk) tn_outer_block(alpha, a, b, beta, c, blk);
}

}  // namespace kernels::omp

void gemm(double alpha, const Matrix& a, Op op_a, const Matrix& b, Op op_b, double beta,
          Matrix& c, Exec exec) {
  // NT and TT are served by an explicit transpose of b; they are rare and cheap here.
  if (op_b == Op::trans) {
    const Matrix bt = b.transpose();
    gemm(alpha, a, op_a, bt, Op::none, beta, c, exec);
    return;
  }
  const bool par = exec == Exec::parallel;
  if (op_a == Op::none) {
    par ? kernels::omp::gemm_nn(alpha, a, b, beta, c) : kernels::serial::gemm_nn(alpha, a, b, beta, c);
  } else {
    par ? kernels::omp::gemm_tn(alpha, a, b, beta, c) : kernels::serial::gemm_tn(alpha, a, b, beta, c);
  }
}

Matrix matmul(const Matrix& a, const Matrix& b, Op op_a, Op op_b, Exec exec) {
  const std::size_t ka = op_a == Op::none ? a.cols() : a.rows();
  const std::size_t kb = op_b == Op::none ? b.rows() : b.cols();
  if (ka != kb) {
    throw DimensionMismatch("matmul: inner dimensions differ (" + a.shape_string() +
                            (op_a == Op::trans ? "^T" : "") + " and " + b.shape_string() +
                            (op_b == Op::trans ? "^T" : "") + ")");
  }
  if (!a.all_finite() || !b.all_finite()) throw ValidationError("matmul: non-finite input");
  Matrix c;
  gemm(1.0, a, op_a, b, op_b, 0.0, c, exec);
  return c;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: length mismatch");
  return dot_kernel(x.data(), y.data(), x.size());
}

double norm2(std::span<const double> x) { return frobenius_norm(x); }

namespace {
double pairwise_sumsq(const double* x, std::size_t n) {
  constexpr std::size_t base = 256;
  if (n <= base) {
    double s = 0.0;
#pragma omp simd reduction(+ : s)
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
  }
  const std::size_t half = (n / 2 + base - 1) / base * base;
  return pairwise_sumsq(x, half) + pairwise_sumsq(x + half, n - half);
}
}  // namespace

double frobenius_norm(std::span<const double> x) { return std::sqrt(pairwise_sumsq(x.data(), x.size())); }

double frobenius_norm(const Matrix& a) { return frobenius_norm(a.data()); }

}  // namespace rqb
