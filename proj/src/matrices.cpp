#include "randqb/matrices.hpp"

#include <algorithm>
#include <cmath>

#include "randqb/dense.hpp"
#include "randqb/errors.hpp"
#include "randqb/kernels.hpp"

namespace rqb {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("gen_test_matrix: " + what);
}

// U diag(d) V^T with U, V from orthonormalized Gaussians; d may be unsorted.
Matrix svd_synthesis(RngStream& stream, std::size_t m, std::size_t n, const std::vector<double>& d) {
  const std::size_t r = d.size();
  Matrix u = orth(gaussian_matrix(stream, m, r), RankCheck::none);
  const Matrix v = orth(gaussian_matrix(stream, n, r), RankCheck::none);
  for (std::size_t j = 0; j < r; ++j)
    for (double& x : u.col(j)) x *= d[j];
  Matrix a;
  gemm(1.0, u, Op::none, v, Op::trans, 0.0, a);
  return a;
}

std::vector<double> fast_decay_d(RngStream& s, std::size_t r, const FamilyParams& p) {
  require(p.beta > 0.0 && p.beta < 1.0, "beta must lie in (0, 1)");
  std::vector<double> d(r);
  double scale = 1.0;
  for (std::size_t j = 0; j < r; ++j) {
    const double g = s.next_uniform();
    d[j] = g * g * scale;
    scale *= p.beta;
  }
  return d;
}

std::vector<double> slow_decay_d(std::size_t r, const FamilyParams& p) {
  require(p.slow_rate > 0.0, "slow_rate must be positive");
  std::vector<double> d(r);
  for (std::size_t j = 0; j < r; ++j) d[j] = 1.0 / std::sqrt(1.0 + p.slow_rate * static_cast<double>(j));
  return d;
}

std::vector<double> s_shaped_d(RngStream& s, std::size_t r, const FamilyParams& p) {
  require(p.knee1 >= 1 && p.knee2 > p.knee1, "need 1 <= knee1 < knee2");
  require(p.top_lo > 0.0 && p.top_lo <= 1.0, "top_lo must lie in (0, 1]");
  require(p.plateau > 0.0 && p.plateau < p.top_lo, "plateau must lie in (0, top_lo)");
  std::vector<double> d(r);
  const std::size_t k1 = std::min(p.knee1, r);
  for (std::size_t j = 0; j < k1; ++j) d[j] = p.top_lo + (1.0 - p.top_lo) * s.next_uniform();
  if (k1 == r) return d;
  const double start = d[k1 - 1];
  const double span = static_cast<double>(p.knee2 - p.knee1);
  for (std::size_t j = k1; j < r; ++j) {
    const std::size_t jj = j + 1;  // one-based
    if (jj <= p.knee2) {
      d[j] = start * std::pow(p.plateau / start, static_cast<double>(jj - p.knee1) / span);
    } else {
      d[j] = p.plateau;
    }
  }
  return d;
}

Matrix sparse_family(RngStream& s, std::size_t m, std::size_t n, const FamilyParams& p) {
  require(p.density > 0.0 && p.density <= 1.0, "density must lie in (0, 1]");
  const std::size_t r = std::min(m, n);
  Matrix a(m, n);
  for (std::size_t j = 1; j <= r; ++j) {
    const double w = (j <= p.lead_count ? p.lead_weight : 1.0) / static_cast<double>(j);
    const Matrix x = sparse_uniform_vector(s, m, p.density);
    const Matrix y = sparse_uniform_vector(s, n, p.density);
    for (std::size_t c = 0; c < n; ++c) {
      if (y(c, 0) == 0.0) continue;
      const double wy = w * y(c, 0);
      for (std::size_t i = 0; i < m; ++i)
        if (x(i, 0) != 0.0) a(i, c) += x(i, 0) * wy;
    }
  }
  return a;
}

Matrix kahan_family(RngStream& s, std::size_t m, std::size_t n, const FamilyParams& p) {
  double zeta = p.zeta;
  if (p.random_zeta) {
    require(0.0 < p.zeta_lo && p.zeta_lo < p.zeta_hi && p.zeta_hi < 1.0, "bad zeta range");
    zeta = p.zeta_lo + (p.zeta_hi - p.zeta_lo) * s.next_uniform();
  }
  require(zeta > 0.0 && zeta < 1.0, "zeta must lie in (0, 1)");
  const double phi = std::sqrt((1.0 - zeta) * (1.0 + zeta));
  Matrix a(m, n);
  double si = 1.0;
  for (std::size_t i = 0; i < std::min(m, n); ++i) {
    a(i, i) = si;
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = -phi * si;
    si *= zeta;
  }
  return a;
}

}  // namespace

std::string family_id(Family f) {
  return "m" + std::to_string(static_cast<int>(f) + 1);
}

Family parse_family(std::string_view s) {
  if (s == "m1" || s == "fast_decay") return Family::fast_decay;
  if (s == "m2" || s == "slow_decay") return Family::slow_decay;
  if (s == "m3" || s == "sparse") return Family::sparse;
  if (s == "m4" || s == "kahan") return Family::kahan;
  if (s == "m5" || s == "s_shaped") return Family::s_shaped;
  throw ValidationError("unknown matrix family '" + std::string(s) + "'");
}

TestMatrixSpec default_spec(Family f, std::uint64_t seed) {
  TestMatrixSpec spec;
  spec.family = f;
  spec.seed = seed;
  if (f == Family::kahan) spec.m = spec.n = 1000;
  return spec;
}

GeneratedMatrix gen_test_matrix(const TestMatrixSpec& spec, RngStream& stream) {
  require(spec.m >= 1 && spec.n >= 1, "dimensions must be positive");
  const std::size_t r = std::min(spec.m, spec.n);
  const FamilyParams& p = spec.params;
  GeneratedMatrix out;
  std::vector<double> d;
  switch (spec.family) {
    case Family::fast_decay: d = fast_decay_d(stream, r, p); break;
    case Family::slow_decay: d = slow_decay_d(r, p); break;
    case Family::s_shaped: d = s_shaped_d(stream, r, p); break;
    case Family::sparse: out.a = sparse_family(stream, spec.m, spec.n, p); break;
    case Family::kahan: out.a = kahan_family(stream, spec.m, spec.n, p); break;
  }
  if (!d.empty()) {
    out.a = svd_synthesis(stream, spec.m, spec.n, d);
    out.d = SingularValues::from_unsorted(std::move(d));
  }
  if (p.sigma1 > 0.0) {
    const double s1 = out.d ? (*out.d)[0] : spectral_norm_est(out.a).value;
    require(s1 > 0.0, "cannot normalize a zero matrix");
    const double f = p.sigma1 / s1;
    out.a.scale(f);
    if (out.d) {
      std::vector<double> v = out.d->values();
      for (double& x : v) x *= f;
      out.d = SingularValues(std::move(v));
    }
  }
  return out;
}

GeneratedMatrix gen_test_matrix(const TestMatrixSpec& spec) {
  RngStream stream(spec.seed);
  return gen_test_matrix(spec, stream);
}

OptimalErrors optimal_errors(const SingularValues& d, std::size_t k) {
  if (k >= d.size()) {
    if (k == d.size()) return {0.0, 0.0};
    throw ValidationError("optimal_errors: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(d.size()) + " singular values");
  }
  const auto& v = d.values();
  return {frobenius_norm(std::span<const double>(v.data() + k, v.size() - k)), v[k]};
}

std::size_t numerical_rank(const SingularValues& d, double rel) {
  if (d.size() == 0) return 0;
  const double cut = rel * d[0];
  std::size_t k = 0;
  while (k < d.size() && d[k] > cut) ++k;
  return k;
}

}  // namespace rqb
