#include <algorithm>
#include <cmath>

#include "randqb/dense.hpp"
#include "randqb/rng.hpp"

namespace rqb {

Matrix back_substitute(const Matrix& r, const Matrix& b) {
  const std::size_t n = r.rows();
  if (r.cols() != n) throw DimensionMismatch("back_substitute: r must be square, got " + r.shape_string());
  if (b.rows() != n) {
    throw DimensionMismatch("back_substitute: r is " + r.shape_string() + ", b is " + b.shape_string());
  }
  double rmax = 0.0;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i <= c; ++i) rmax = std::max(rmax, std::abs(r(i, c)));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(r(i, i)) > 1e-14 * rmax)) {
      throw NearSingular("back_substitute: diagonal entry " + std::to_string(i) + " is " +
                         std::to_string(r(i, i)) + " against max " + std::to_string(rmax));
    }
  }
  Matrix x = b;
  // Column-oriented: x(i) /= r_ii, then eliminate it from rows above.
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double* xc = x.col(c).data();
    for (std::size_t i = n; i-- > 0;) {
      xc[i] /= r(i, i);
      const double xi = xc[i];
      const double* ri = r.col(i).data();
      for (std::size_t k = 0; k < i; ++k) xc[k] -= ri[k] * xi;
    }
  }
  return x;
}

NormEstimate spectral_norm_est(const Matrix& a, double tol, std::size_t max_iters,
                               std::uint64_t seed, Exec exec) {
  if (a.empty()) throw ValidationError("spectral_norm_est: empty matrix");
  if (!(tol > 0.0)) throw ValidationError("spectral_norm_est: tol must be positive");
  RngStream stream(seed);
  Matrix x = gaussian_matrix(stream, a.cols(), 1);
  x.scale(1.0 / frobenius_norm(x));
  Matrix y, z;
  NormEstimate est;
  double prev = 0.0;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    gemm(1.0, a, Op::none, x, Op::none, 0.0, y, exec);
    const double cur = frobenius_norm(y);
    est.value = cur;
    est.iterations = it;
    if (cur == 0.0) {
      est.converged = true;
      break;
    }
    if (it > 1 && std::abs(cur - prev) <= tol * cur) {
      est.converged = true;
      break;
    }
    prev = cur;
    gemm(1.0, a, Op::trans, y, Op::none, 0.0, z, exec);
    const double zn = frobenius_norm(z);
    if (zn == 0.0) {
      est.converged = true;
      break;
    }
    z.scale(1.0 / zn);
    std::swap(x, z);
  }
  return est;
}

double orthonormality_defect(const Matrix& q, Exec exec) {
  Matrix g;
  gemm(1.0, q, Op::trans, q, Op::none, 0.0, g, exec);
  for (std::size_t j = 0; j < g.cols(); ++j) g(j, j) -= 1.0;
  return frobenius_norm(g);
}

}  // namespace rqb
