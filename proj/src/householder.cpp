#include <algorithm>
#include <cmath>
#include <numeric>

#include "randqb/dense.hpp"

namespace rqb {
namespace {

// Reflector H = I - tau v v^T with v(0) = 1 annihilating x(1:). Overwrites x
// with (beta, v(1:)) and returns tau.
double make_reflector(double* x, std::size_t len) {
  if (len <= 1) return 0.0;
  const double xnorm = frobenius_norm(std::span<const double>(x + 1, len - 1));
  if (xnorm == 0.0) return 0.0;
  const double alpha = x[0];
  const double beta = -std::copysign(std::hypot(alpha, xnorm), alpha);
  const double inv = 1.0 / (alpha - beta);
  for (std::size_t i = 1; i < len; ++i) x[i] *= inv;
  x[0] = beta;
  return (beta - alpha) / beta;
}

// y <- H y for a column y of length len; v(0) = 1 implied.
inline void apply_reflector(const double* v, double tau, double* y, std::size_t len) {
  double s = y[0];
#pragma omp simd reduction(+ : s)
  for (std::size_t i = 1; i < len; ++i) s += v[i] * y[i];
  s *= tau;
  y[0] -= s;
#pragma omp simd
  for (std::size_t i = 1; i < len; ++i) y[i] -= s * v[i];
}

// Apply reflector stored in column j of w (rows j..m-1) to columns [c0, c1) of target.
void apply_to_columns(const Matrix& w, std::size_t j, double tau, Matrix& target, std::size_t c0,
                      std::size_t c1, Exec exec) {
  if (tau == 0.0 || c0 >= c1) return;
  const std::size_t m = w.rows();
  const double* v = w.col(j).data() + j;
  const std::size_t len = m - j;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t c = c0; c < c1; ++c) apply_reflector(v, tau, target.col(c).data() + j, len);
  } else {
    for (std::size_t c = c0; c < c1; ++c) apply_reflector(v, tau, target.col(c).data() + j, len);
  }
}

// Explicit thin Q (m x t) from the reflectors stored below the diagonal of w.
Matrix form_q(const Matrix& w, const std::vector<double>& tau, Exec exec) {
  const std::size_t m = w.rows();
  const std::size_t t = tau.size();
  Matrix q(m, t);
  for (std::size_t j = 0; j < t; ++j) q(j, j) = 1.0;
  for (std::size_t jj = t; jj-- > 0;) apply_to_columns(w, jj, tau[jj], q, jj, t, exec);
  return q;
}

// Flip signs so the diagonal of r is non-negative.
void fix_signs(Matrix& q, Matrix& r) {
  const std::size_t t = std::min(r.rows(), r.cols());
  for (std::size_t j = 0; j < t; ++j) {
    if (r(j, j) < 0.0) {
      for (std::size_t c = j; c < r.cols(); ++c) r(j, c) = -r(j, c);
      for (double& x : q.col(j)) x = -x;
    }
  }
}

}  // namespace

QRFactors householder_qr(const Matrix& a, Exec exec) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    throw DimensionMismatch("householder_qr: needs rows >= cols, got " + a.shape_string());
  }
  Matrix w = a;
  std::vector<double> tau(n);
  for (std::size_t j = 0; j < n; ++j) {
    tau[j] = make_reflector(w.col(j).data() + j, m - j);
    apply_to_columns(w, j, tau[j], w, j + 1, n, exec);
  }
  Matrix r(n, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i <= c; ++i) r(i, c) = w(i, c);
  Matrix q = form_q(w, tau, exec);
  fix_signs(q, r);
  return {std::move(q), std::move(r)};
}

Matrix orth(const Matrix& x, RankCheck check, Exec exec) {
  auto [q, r] = householder_qr(x, exec);
  if (check == RankCheck::strict) {
    const double xn = frobenius_norm(x);
    const double floor = kOrthRankTol * xn;
    for (std::size_t j = 0; j < r.cols(); ++j) {
      if (xn == 0.0 || r(j, j) < floor) {
        throw RankDeficient("orth: column " + std::to_string(j) + " pivot " +
                                std::to_string(r(j, j)) + " below rank threshold",
                            j);
      }
    }
  }
  return std::move(q);
}

PivotedQRFactors pivoted_qr(const Matrix& a, std::size_t max_steps) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  const std::size_t t = std::min({m, n, max_steps});
  Matrix w = a;
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), std::size_t{0});
  std::vector<double> vn1(n), vn2(n), tau(t);
  for (std::size_t j = 0; j < n; ++j) vn1[j] = vn2[j] = frobenius_norm(w.col(j));
  const double tol3z = std::sqrt(std::numeric_limits<double>::epsilon());

  for (std::size_t i = 0; i < t; ++i) {
    const auto best = static_cast<std::size_t>(
        std::max_element(vn1.begin() + static_cast<std::ptrdiff_t>(i), vn1.end()) - vn1.begin());
    if (best != i) {
      std::swap_ranges(w.col(i).begin(), w.col(i).end(), w.col(best).begin());
      std::swap(piv[i], piv[best]);
      std::swap(vn1[i], vn1[best]);
      std::swap(vn2[i], vn2[best]);
    }
    tau[i] = make_reflector(w.col(i).data() + i, m - i);
    apply_to_columns(w, i, tau[i], w, i + 1, n, Exec::serial);
    // Downdate trailing norms; recompute when cancellation has eaten the estimate.
    for (std::size_t j = i + 1; j < n; ++j) {
      if (vn1[j] == 0.0) continue;
      double temp = std::abs(w(i, j)) / vn1[j];
      temp = std::max(0.0, 1.0 - temp * temp);
      const double ratio = vn1[j] / vn2[j];
      if (temp * ratio * ratio <= tol3z) {
        vn1[j] = i + 1 < m ? frobenius_norm(std::span<const double>(w.col(j).data() + i + 1, m - i - 1))
                           : 0.0;
        vn2[j] = vn1[j];
      } else {
        vn1[j] *= std::sqrt(temp);
      }
    }
  }
  Matrix r(t, n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < t && i <= c; ++i) r(i, c) = w(i, c);
  Matrix q = form_q(w, tau, Exec::serial);
  fix_signs(q, r);
  return {std::move(q), std::move(r), std::move(piv)};
}

}  // namespace rqb
