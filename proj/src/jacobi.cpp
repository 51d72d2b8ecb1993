#include <algorithm>
#include <cmath>
#include <numeric>

#include "randqb/dense.hpp"

namespace rqb {
namespace {

struct Gram {
  double alpha, beta, gamma;
};

Gram gram_pair(const double* x, const double* y, std::size_t n) {
  double a = 0.0, b = 0.0, g = 0.0;
#pragma omp simd reduction(+ : a, b, g)
  for (std::size_t i = 0; i < n; ++i) {
    a += x[i] * x[i];
    b += y[i] * y[i];
    g += x[i] * y[i];
  }
  return {a, b, g};
}

void rotate(double* x, double* y, std::size_t n, double c, double s) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

// Circle-method schedule: round r pairs are disjoint, every pair appears once per sweep.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> round_robin(std::size_t n) {
  const std::size_t players = n + (n % 2);
  std::vector<std::size_t> ring(players);
  std::iota(ring.begin(), ring.end(), std::size_t{0});
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rounds;
  if (players < 2) return rounds;
  for (std::size_t r = 0; r + 1 < players; ++r) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < players / 2; ++k) {
      std::size_t p = ring[k];
      std::size_t q = ring[players - 1 - k];
      if (p >= n || q >= n) continue;
      if (p > q) std::swap(p, q);
      pairs.emplace_back(p, q);
    }
    rounds.push_back(std::move(pairs));
    std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
  }
  return rounds;
}

// Rotates columns of w (and v) until they are mutually orthogonal. Returns sweeps used,
// or -1 when max_sweeps ran out.
int hestenes(Matrix& w, Matrix* v, const JacobiOptions& opts) {
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  const auto rounds = round_robin(n);
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    bool rotated = false;
    for (const auto& pairs : rounds) {
      const auto np = static_cast<std::ptrdiff_t>(pairs.size());
      auto work = [&](std::ptrdiff_t t) -> bool {
        const auto [p, q] = pairs[static_cast<std::size_t>(t)];
        double* wp = w.col(p).data();
        double* wq = w.col(q).data();
        const Gram g = gram_pair(wp, wq, m);
        if (g.gamma == 0.0 || std::abs(g.gamma) <= opts.tol * std::sqrt(g.alpha * g.beta)) {
          return false;
        }
        const double zeta = (g.beta - g.alpha) / (2.0 * g.gamma);
        const double tn = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + tn * tn);
        const double s = c * tn;
        rotate(wp, wq, m, c, s);
        if (v) rotate(v->col(p).data(), v->col(q).data(), v->rows(), c, s);
        return true;
      };
      if (opts.exec == Exec::parallel) {
        bool any = false;
#pragma omp parallel for schedule(static) reduction(|| : any)
        for (std::ptrdiff_t t = 0; t < np; ++t) any = work(t) || any;
        rotated = rotated || any;
      } else {
        for (std::ptrdiff_t t = 0; t < np; ++t) rotated = work(t) || rotated;
      }
    }
    if (!rotated) return sweep;
  }
  return -1;
}

// Fill columns flagged in `missing` with unit vectors orthogonal to all others.
void complete_basis(Matrix& u, const std::vector<bool>& missing) {
  const std::size_t m = u.rows();
  std::vector<bool> filled(u.cols());
  for (std::size_t j = 0; j < u.cols(); ++j) filled[j] = !missing[j];
  for (std::size_t j = 0; j < u.cols(); ++j) {
    if (!missing[j]) continue;
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < m && best_norm < 0.5; ++e) {
      std::vector<double> x(m, 0.0);
      x[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c = 0; c < u.cols(); ++c) {
          if (!filled[c]) continue;
          const double h = dot(u.col(c), x);
          for (std::size_t i = 0; i < m; ++i) x[i] -= h * u(i, c);
        }
      }
      const double nx = norm2(x);
      if (nx > best_norm) {
        best_norm = nx;
        best = std::move(x);
      }
    }
    for (std::size_t i = 0; i < m; ++i) u(i, j) = best[i] / best_norm;
    filled[j] = true;
  }
}

// SVD for rows >= cols.
SVDFactors jacobi_tall(const Matrix& a, const JacobiOptions& opts) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (!a.all_finite()) throw ValidationError("jacobi_svd: non-finite input");

  // Precondition: a(:, piv) = Q R, then run Jacobi on R^T, which is far better
  // ordered than a itself. R^T = W_x V_x^T gives a = (Q V_x) S (P U_x)^T.
  PivotedQRFactors pqr = pivoted_qr(a);
  Matrix w = pqr.r.transpose();  // n x n
  Matrix vx = opts.compute_u ? Matrix::identity(n) : Matrix();
  const int sweeps = hestenes(w, opts.compute_u ? &vx : nullptr, opts);

  std::vector<double> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = frobenius_norm(w.col(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return s[x] > s[y]; });

  SVDFactors out;
  out.k = n;
  std::vector<double> sorted(n);
  for (std::size_t j = 0; j < n; ++j) sorted[j] = s[order[j]];
  out.sigma = SingularValues(sorted);

  if (opts.compute_u) {
    Matrix ux = vx.select_cols(order);
    out.u = matmul(pqr.q, ux, Op::none, Op::none, opts.exec);
  }
  if (opts.compute_v) {
    Matrix wx(n, n);
    std::vector<bool> missing(n, false);
    for (std::size_t j = 0; j < n; ++j) {
      const double sj = sorted[j];
      const auto src = w.col(order[j]);
      if (sj > 0.0 && std::isfinite(1.0 / sj)) {
        for (std::size_t i = 0; i < n; ++i) wx(i, j) = src[i] / sj;
      } else {
        missing[j] = true;
      }
    }
    complete_basis(wx, missing);
    Matrix v(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) v(pqr.pivots[i], j) = wx(i, j);
    out.v = std::move(v);
  }
  (void)m;
  if (sweeps < 0) {
    throw ConvergenceError("jacobi_svd: no convergence after " + std::to_string(opts.max_sweeps) +
                               " sweeps",
                           std::move(out), opts.max_sweeps);
  }
  return out;
}

}  // namespace

SVDFactors jacobi_svd(const Matrix& a, const JacobiOptions& opts) {
  if (a.rows() >= a.cols()) return jacobi_tall(a, opts);
  JacobiOptions swapped = opts;
  std::swap(swapped.compute_u, swapped.compute_v);
  try {
    SVDFactors t = jacobi_tall(a.transpose(), swapped);
    std::swap(t.u, t.v);
    return t;
  } catch (const ConvergenceError& e) {
    SVDFactors t = e.last_iterate();
    std::swap(t.u, t.v);
    throw ConvergenceError(e.what(), std::move(t), e.sweeps());
  }
}

}  // namespace rqb
