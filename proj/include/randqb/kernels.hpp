#pragma once

#include <span>

#include "randqb/matrix.hpp"

namespace rqb {

// Serial is the reproducible default. The OpenMP path partitions work over
// output tiles only, so each entry sees the same summation order either way.
enum class Exec { serial, parallel };

enum class Op { none, trans };

// c = alpha * op(a) * op(b) + beta * c. When beta == 0, c is resized and its
// previous contents ignored.
void gemm(double alpha, const Matrix& a, Op op_a, const Matrix& b, Op op_b, double beta,
          Matrix& c, Exec exec = Exec::serial);

// Checked product op(a) * op(b). Rejects non-finite input.
Matrix matmul(const Matrix& a, const Matrix& b, Op op_a = Op::none, Op op_b = Op::none,
              Exec exec = Exec::serial);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

// Pairwise summation of squares.
double frobenius_norm(std::span<const double> x);
double frobenius_norm(const Matrix& a);

namespace kernels {

// Reference paths, kept separately callable for tests and benchmarks.
namespace serial {
void gemm_nn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c);
void gemm_tn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c);
}  // namespace serial

namespace omp {
void gemm_nn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c);
void gemm_tn(double alpha, const Matrix& a, const Matrix& b, double beta, Matrix& c);
}  // namespace omp

}  // namespace kernels
}  // namespace rqb
