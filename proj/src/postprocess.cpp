#include "randqb/postprocess.hpp"

#include <algorithm>
#include <cmath>

namespace rqb {

SVDFactors truncate_svd(const SVDFactors& f, std::size_t k) {
  if (k > f.k) {
    throw ValidationError("truncate_svd: k=" + std::to_string(k) + " exceeds available rank " +
                          std::to_string(f.k));
  }
  SVDFactors out;
  out.k = k;
  out.u = f.u.cols_range(0, k);
  out.v = f.v.cols_range(0, k);
  out.sigma = f.sigma.truncated(k);
  return out;
}

SVDFactors qb_to_svd(const QBFactors& qb, const RankRule& rule, Exec exec) {
  const std::size_t ell = qb.rank();
  if (rule.kind == RankRule::Kind::fixed && rule.k > ell) {
    throw ValidationError("qb_to_svd: requested k=" + std::to_string(rule.k) +
                          " exceeds sample rank " + std::to_string(ell));
  }
  if (rule.kind == RankRule::Kind::tolerance && !(rule.eps >= 0.0)) {
    throw ValidationError("qb_to_svd: tolerance must be >= 0");
  }
  SVDFactors full;
  if (ell == 0) {
    full.u = Matrix(qb.q.rows(), 0);
    full.v = Matrix(qb.b.cols(), 0);
  } else {
    JacobiOptions opts;
    opts.exec = exec;
    SVDFactors inner = jacobi_svd(qb.b, opts);
    full.k = inner.k;
    full.sigma = inner.sigma;
    full.v = std::move(inner.v);
    gemm(1.0, qb.q, Op::none, inner.u, Op::none, 0.0, full.u, exec);
  }
  std::size_t k = rule.k;
  if (rule.kind == RankRule::Kind::tolerance) {
    // Walk the tail from the back: smallest k with tail norm <= eps.
    const auto& s = full.sigma.values();
    k = s.size();
    double tail2 = 0.0;
    while (k > 0) {
      const double next = tail2 + s[k - 1] * s[k - 1];
      if (std::sqrt(next) > rule.eps) break;
      tail2 = next;
      --k;
    }
  }
  return truncate_svd(full, std::min(k, full.k));
}

Matrix svd_reconstruct(const SVDFactors& f, Exec exec) {
  Matrix us = f.u;
  for (std::size_t j = 0; j < f.k; ++j)
    for (double& x : us.col(j)) x *= f.sigma[j];
  Matrix out;
  gemm(1.0, us, Op::none, f.v, Op::trans, 0.0, out, exec);
  return out;
}

PivotedQRFactors qb_to_qr(const QBFactors& qb, Exec exec) {
  PivotedQRFactors inner = pivoted_qr(qb.b);
  PivotedQRFactors out;
  gemm(1.0, qb.q, Op::none, inner.q, Op::none, 0.0, out.q, exec);
  out.r = std::move(inner.r);
  out.pivots = std::move(inner.pivots);
  return out;
}

IDFactors qb_to_id(const QBFactors& qb, std::size_t k) {
  const std::size_t ell = qb.rank();
  const std::size_t n = qb.b.cols();
  if (k > ell || k > n) {
    throw ValidationError("qb_to_id: k=" + std::to_string(k) + " exceeds sample rank " +
                          std::to_string(ell));
  }
  const PivotedQRFactors f = pivoted_qr(qb.b, k);
  IDFactors out;
  out.column_indices.assign(f.pivots.begin(), f.pivots.begin() + static_cast<std::ptrdiff_t>(k));
  const Matrix r11 = f.r.block(0, 0, k, k);
  const Matrix r12 = f.r.block(0, k, k, n - k);
  const Matrix t = k > 0 ? back_substitute(r11, r12) : Matrix(0, n - k);
  out.y = Matrix(k, n);
  for (std::size_t i = 0; i < k; ++i) out.y(i, f.pivots[i]) = 1.0;
  for (std::size_t j = 0; j < n - k; ++j)
    for (std::size_t i = 0; i < k; ++i) out.y(i, f.pivots[k + j]) = t(i, j);
  double mx = 0.0;
  for (const double v : out.y.data()) mx = std::max(mx, std::abs(v));
  out.max_abs_y = mx;
  return out;
}

CURFactors qb_to_cur(const QBFactors& qb, const Matrix& a, std::size_t k, Exec exec) {
  if (a.rows() != qb.q.rows() || a.cols() != qb.b.cols()) {
    throw DimensionMismatch("qb_to_cur: factors do not match " + a.shape_string());
  }
  IDFactors id = qb_to_id(qb, k);
  CURFactors out;
  out.column_indices = std::move(id.column_indices);
  const Matrix c = a.select_cols(out.column_indices);
  if (k > c.rows()) throw ValidationError("qb_to_cur: k exceeds row count");
  const PivotedQRFactors rows = pivoted_qr(c.transpose(), k);
  out.row_indices.assign(rows.pivots.begin(), rows.pivots.begin() + static_cast<std::ptrdiff_t>(k));
  const Matrix r = a.select_rows(out.row_indices);

  // U = R_c^-1 (Q_c^T A Q_r) R_r^-T with C = Q_c R_c and R^T = Q_r R_r.
  const QRFactors qc = householder_qr(c, exec);
  const QRFactors qr = householder_qr(r.transpose(), exec);
  Matrix aq, mid;
  gemm(1.0, a, Op::none, qr.q, Op::none, 0.0, aq, exec);
  gemm(1.0, qc.q, Op::trans, aq, Op::none, 0.0, mid, exec);
  const Matrix x = back_substitute(qc.r, mid);
  out.u_mid = back_substitute(qr.r, x.transpose()).transpose();
  return out;
}

Matrix id_reconstruct(const Matrix& a, const IDFactors& id, Exec exec) {
  Matrix out;
  gemm(1.0, a.select_cols(id.column_indices), Op::none, id.y, Op::none, 0.0, out, exec);
  return out;
}

Matrix cur_reconstruct(const Matrix& a, const CURFactors& cur, Exec exec) {
  Matrix cu, out;
  gemm(1.0, a.select_cols(cur.column_indices), Op::none, cur.u_mid, Op::none, 0.0, cu, exec);
  gemm(1.0, cu, Op::none, a.select_rows(cur.row_indices), Op::none, 0.0, out, exec);
  return out;
}

}  // namespace rqb
