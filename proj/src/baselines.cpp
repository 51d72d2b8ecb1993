#include "randqb/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "randqb/postprocess.hpp"

namespace rqb {
namespace {

double sumsq(std::span<const double> x) {
  const double v = frobenius_norm(x);
  return v * v;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
#pragma omp simd
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Projects qj onto the complement of the first j columns of q, one MGS pass.
void mgs_pass(const Matrix& q, std::size_t j, std::span<double> qj) {
  for (std::size_t t = 0; t < j; ++t) axpy(-dot(q.col(t), qj), q.col(t), qj);
}

}  // namespace

PivotedQRFactors cpqr_partial(const Matrix& a, std::size_t k, bool reorth, Exec exec) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (k > std::min(m, n)) {
    throw ValidationError("cpqr_partial: k=" + std::to_string(k) + " exceeds min(m,n) for " +
                          a.shape_string());
  }
  if (!a.all_finite()) throw ValidationError("cpqr_partial: non-finite input");
  Matrix res = a;
  Matrix q(m, k);
  Matrix r(k, n);
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), std::size_t{0});
  // norm2: downdated squared column norms; ref: value at the last exact evaluation.
  std::vector<double> norm2(n), ref(n);
  for (std::size_t c = 0; c < n; ++c) norm2[c] = ref[c] = sumsq(res.col(c));

  std::size_t rank = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto best = static_cast<std::size_t>(
        std::max_element(norm2.begin() + static_cast<std::ptrdiff_t>(j), norm2.end()) -
        norm2.begin());
    if (best != j) {
      std::swap_ranges(res.col(j).begin(), res.col(j).end(), res.col(best).begin());
      for (std::size_t i = 0; i < j; ++i) std::swap(r(i, j), r(i, best));
      std::swap(piv[j], piv[best]);
      std::swap(norm2[j], norm2[best]);
      std::swap(ref[j], ref[best]);
    }
    const double nrm = frobenius_norm(res.col(j));
    if (nrm == 0.0) break;
    auto qj = q.col(j);
    for (std::size_t i = 0; i < m; ++i) qj[i] = res(i, j) / nrm;
    if (reorth && j > 0) {
      mgs_pass(q, j, qj);
      const double qn = frobenius_norm(qj);
      if (qn == 0.0) break;
      for (double& x : qj) x /= qn;
    }

    auto update = [&](std::size_t c) {
      auto rc = res.col(c);
      const double s = dot(qj, rc);
      r(j, c) = s;
      axpy(-s, qj, rc);
      if (c == j) return;
      norm2[c] -= s * s;
      if (norm2[c] < 0.1 * ref[c]) norm2[c] = ref[c] = sumsq(rc);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
      for (std::size_t c = j; c < n; ++c) update(c);
    } else {
      for (std::size_t c = j; c < n; ++c) update(c);
    }
    rank = j + 1;
  }
  PivotedQRFactors out;
  out.q = q.cols_range(0, rank);
  out.r = r.rows_range(0, rank);
  out.pivots = std::move(piv);
  return out;
}

QBFactors greedy_rand_single(const Matrix& a, std::size_t k, std::size_t p, RngStream& stream,
                             Exec exec) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (k > std::min(m, n)) {
    throw ValidationError("greedy_rand_single: k=" + std::to_string(k) + " exceeds min(m,n) for " +
                          a.shape_string());
  }
  if (!a.all_finite()) throw ValidationError("greedy_rand_single: non-finite input");
  Matrix res = a;
  QBFactors out;
  out.block_size = 1;
  out.power = p;
  out.q = Matrix(m, 0);
  std::vector<Matrix> rows;
  const double floor = kExhaustedRel * frobenius_norm(a);
  out.stopped_by = StopReason::rank_limit;

  auto normalize = [](Matrix& v) {
    const double nv = frobenius_norm(v);
    if (nv == 0.0) return false;
    v.scale(1.0 / nv);
    return true;
  };

  for (std::size_t j = 0; j < k; ++j) {
    if (frobenius_norm(res) <= floor) {
      out.stopped_by = StopReason::matrix_exhausted;
      break;
    }
    const Matrix omega = gaussian_matrix(stream, n, 1);
    Matrix y, z;
    gemm(1.0, res, Op::none, omega, Op::none, 0.0, y, exec);
    bool ok = normalize(y);
    for (std::size_t it = 0; ok && it < p; ++it) {
      gemm(1.0, res, Op::trans, y, Op::none, 0.0, z, exec);
      ok = normalize(z);
      if (!ok) break;
      gemm(1.0, res, Op::none, z, Op::none, 0.0, y, exec);
      ok = normalize(y);
    }
    if (ok && j > 0) {
      Matrix h;
      gemm(1.0, out.q, Op::trans, y, Op::none, 0.0, h, exec);
      gemm(-1.0, out.q, Op::none, h, Op::none, 1.0, y, exec);
      ok = normalize(y);
    }
    if (!ok) {
      out.stopped_by = StopReason::matrix_exhausted;
      break;
    }
    Matrix bj;
    gemm(1.0, y, Op::trans, res, Op::none, 0.0, bj, exec);
    gemm(-1.0, y, Op::none, bj, Op::none, 1.0, res, exec);
    out.q.append_cols(y);
    rows.push_back(std::move(bj));
    out.residual_history.push_back(frobenius_norm(res));
  }
  out.b = rows.empty() ? Matrix(0, n) : Matrix::vstack(rows);
  return out;
}

SVDFactors truncated_svd_oracle(const Matrix& a, std::size_t k, Exec exec) {
  if (k > std::min(a.rows(), a.cols())) {
    throw ValidationError("truncated_svd_oracle: k=" + std::to_string(k) + " exceeds min(m,n)");
  }
  JacobiOptions opts;
  opts.exec = exec;
  return truncate_svd(jacobi_svd(a, opts), k);
}

SingularValues singular_values(const Matrix& a, Exec exec) {
  JacobiOptions opts;
  opts.compute_u = opts.compute_v = false;
  opts.exec = exec;
  return jacobi_svd(a, opts).sigma;
}

}  // namespace rqb
