#include "randqb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "randqb/baselines.hpp"
#include "randqb/postprocess.hpp"

namespace rqb {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct CurvePoint {
  std::size_t k;
  double fro;
  double spec;
};

double rel(double x, double denom) { return denom > 0.0 ? x / denom : 0.0; }

CurvePoint measure(const PreparedMatrix& pm, const Matrix& e, std::size_t k, Exec exec) {
  const double spec = spectral_norm_est(e, 1e-10, 2000, 0x5eed, exec).value;
  return {k, rel(frobenius_norm(e), pm.norm_fro), rel(spec, pm.norm_spec)};
}

// Errors of the rank-k truncations of the SVD of a QB factorization.
// Ranks beyond the sample size reuse the full sample.
std::vector<CurvePoint> truncation_curve(const PreparedMatrix& pm, const QBFactors& qb,
                                         const std::vector<std::size_t>& ks, Exec exec) {
  const SVDFactors f = qb_to_svd(qb, RankRule::fixed(qb.rank()), exec);
  Matrix e = pm.a;
  std::size_t done = 0;
  std::vector<CurvePoint> out;
  for (const std::size_t k : ks) {
    const std::size_t kk = std::min(k, f.k);
    if (kk > done) {
      Matrix us = f.u.cols_range(done, kk - done);
      for (std::size_t j = 0; j < kk - done; ++j)
        for (double& x : us.col(j)) x *= f.sigma[done + j];
      gemm(-1.0, us, Op::none, f.v.cols_range(done, kk - done), Op::trans, 1.0, e, exec);
      done = kk;
    }
    out.push_back(measure(pm, e, k, exec));
  }
  return out;
}

// Errors of (I - Q_k Q_k^T) A for the leading k columns of an orthonormal q.
std::vector<CurvePoint> projection_curve(const PreparedMatrix& pm, const Matrix& q,
                                         const std::vector<std::size_t>& ks, Exec exec) {
  Matrix e = pm.a;
  std::size_t done = 0;
  std::vector<CurvePoint> out;
  for (const std::size_t k : ks) {
    const std::size_t kk = std::min(k, q.cols());
    if (kk > done) {
      const Matrix qn = q.cols_range(done, kk - done);
      Matrix h;
      gemm(1.0, qn, Op::trans, e, Op::none, 0.0, h, exec);
      gemm(-1.0, qn, Op::none, h, Op::none, 1.0, e, exec);
      done = kk;
    }
    out.push_back(measure(pm, e, k, exec));
  }
  return out;
}

std::size_t sample_size(const AlgorithmSpec& alg, std::size_t kmax, std::size_t os, std::size_t cap) {
  const std::size_t extra = os ? os : (alg.is_blocked() ? alg.b : 10);
  return std::min(kmax + extra, cap);
}

QBFactors run_qb(const AlgorithmSpec& alg, const Matrix& a, const StopCriterion& stop,
                 RngStream& stream, Exec exec) {
  switch (alg.alg) {
    case AlgId::qb: return rand_qb(a, stop.max_rank, stream, exec);
    case AlgId::qb_p: return rand_qb_p(a, stop.max_rank, alg.p, stream, alg.reorth, exec);
    case AlgId::qb_b: return rand_qb_b(a, stop, alg.b, stream, true, exec);
    case AlgId::qb_pb: return rand_qb_pb(a, stop, alg.p, alg.b, stream, alg.reorth, true, exec);
    default: break;
  }
  throw ValidationError(std::string("not a QB algorithm: ") + to_string(alg.alg));
}

ErrorRecord make_record(const PreparedMatrix& pm, const std::string& label, std::size_t p,
                        std::size_t b, const CurvePoint& c, std::size_t trial, std::uint64_t seed,
                        double ms) {
  return {pm.id, label, p, b, c.k, trial, seed, c.fro, c.spec, ms};
}

void append_svd_rows(const PreparedMatrix& pm, const std::vector<std::size_t>& ks,
                     std::vector<ErrorRecord>& out) {
  for (const std::size_t k : ks) {
    const OptimalErrors o = optimal_errors(pm.sigma, std::min(k, pm.sigma.size()));
    out.push_back(make_record(pm, "svd", 0, 0, {k, rel(o.fro, pm.norm_fro), rel(o.spec, pm.norm_spec)},
                              0, 0, 0.0));
  }
}

void append_cpqr_rows(const PreparedMatrix& pm, const std::vector<std::size_t>& ks, Exec exec,
                      std::vector<ErrorRecord>& out) {
  const std::size_t kmax = std::min(ks.back(), std::min(pm.a.rows(), pm.a.cols()));
  const auto t0 = Clock::now();
  const PivotedQRFactors f = cpqr_partial(pm.a, kmax, true, exec);
  const double ms = ms_since(t0);
  for (const auto& c : projection_curve(pm, f.q, ks, exec)) out.push_back(make_record(pm, "cpqr", 0, 0, c, 0, 0, ms));
}

// One randomized algorithm, one stream: either a k-grid curve or, in
// tolerance mode, a single record at the rank reached.
void append_random_rows(const ExperimentConfig& cfg, const PreparedMatrix& pm,
                        const AlgorithmSpec& alg, const std::vector<std::size_t>& ks,
                        RngStream stream, std::size_t trial, Exec exec,
                        std::vector<ErrorRecord>& out) {
  const std::size_t cap = std::min(pm.a.rows(), pm.a.cols());
  const std::uint64_t seed = stream.origin_seed();
  const std::size_t bcol = alg.alg == AlgId::greedy ? 1 : (alg.is_blocked() ? alg.b : 0);
  if (alg.alg == AlgId::greedy) {
    const auto t0 = Clock::now();
    const QBFactors f = greedy_rand_single(pm.a, std::min(ks.back(), cap), alg.p, stream, exec);
    const double ms = ms_since(t0);
    for (const auto& c : projection_curve(pm, f.q, ks, exec))
      out.push_back(make_record(pm, alg.label(), alg.p, bcol, c, trial, seed, ms));
    return;
  }
  if (ks.empty()) {
    const StopCriterion stop{*cfg.tol_rel * pm.norm_fro, cap};
    const auto t0 = Clock::now();
    const QBFactors f = run_qb(alg, pm.a, stop, stream, exec);
    const double ms = ms_since(t0);
    Matrix e = pm.a;
    gemm(-1.0, f.q, Op::none, f.b, Op::none, 1.0, e, exec);
    out.push_back(make_record(pm, alg.label(), alg.p, bcol, measure(pm, e, f.rank(), exec), trial, seed, ms));
    return;
  }
  const StopCriterion stop{0.0, sample_size(alg, ks.back(), cfg.oversampling, cap)};
  const auto t0 = Clock::now();
  const QBFactors f = run_qb(alg, pm.a, stop, stream, exec);
  const double ms = ms_since(t0);
  for (const auto& c : truncation_curve(pm, f, ks, exec))
    out.push_back(make_record(pm, alg.label(), alg.p, bcol, c, trial, seed, ms));
}

std::vector<ErrorRecord> sweep(const ExperimentConfig& cfg, const PreparedMatrix& pm, bool with_cpqr) {
  std::vector<ErrorRecord> out;
  const auto& ks = cfg.k_grid;
  if (ks.empty()) {
    // Tolerance mode: svd row at the smallest k meeting the tolerance.
    const double eps = *cfg.tol_rel * pm.norm_fro;
    std::size_t k = pm.sigma.size();
    double tail2 = 0.0;
    while (k > 0 && std::sqrt(tail2 + pm.sigma[k - 1] * pm.sigma[k - 1]) <= eps) {
      tail2 += pm.sigma[k - 1] * pm.sigma[k - 1];
      --k;
    }
    append_svd_rows(pm, {k}, out);
  } else {
    append_svd_rows(pm, ks, out);
    if (with_cpqr) append_cpqr_rows(pm, ks, cfg.exec, out);
  }
  for (const AlgorithmSpec& alg : cfg.algorithms) {
    if (alg.alg == AlgId::svd || alg.alg == AlgId::cpqr) continue;
    append_random_rows(cfg, pm, alg, ks, RngStream(cfg.base_seed), 0, cfg.exec, out);
  }
  return out;
}

}  // namespace

const char* to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::accuracy: return "accuracy";
    case Experiment::stats: return "stats";
    case Experiment::skip_reorth: return "skip-reorth";
    case Experiment::speed: return "speed";
    case Experiment::cost_model: return "cost";
  }
  return "unknown";
}

const char* to_string(AlgId a) noexcept {
  switch (a) {
    case AlgId::qb: return "qb";
    case AlgId::qb_b: return "qb_b";
    case AlgId::qb_p: return "qb_p";
    case AlgId::qb_pb: return "qb_pb";
    case AlgId::cpqr: return "cpqr";
    case AlgId::svd: return "svd";
    case AlgId::greedy: return "greedy";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view s) {
  if (s == "accuracy") return Experiment::accuracy;
  if (s == "stats") return Experiment::stats;
  if (s == "skip-reorth" || s == "skip_reorth") return Experiment::skip_reorth;
  if (s == "speed") return Experiment::speed;
  if (s == "cost" || s == "cost_model") return Experiment::cost_model;
  throw ValidationError("unknown experiment '" + std::string(s) + "'");
}

AlgId parse_alg(std::string_view s) {
  for (AlgId a : {AlgId::qb, AlgId::qb_b, AlgId::qb_p, AlgId::qb_pb, AlgId::cpqr, AlgId::svd, AlgId::greedy})
    if (s == to_string(a)) return a;
  throw ValidationError("unknown algorithm '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ValidationError("unknown format '" + std::string(s) + "'");
}

bool AlgorithmSpec::is_qb_family() const noexcept {
  return alg == AlgId::qb || alg == AlgId::qb_b || alg == AlgId::qb_p || alg == AlgId::qb_pb;
}

std::string AlgorithmSpec::label() const {
  std::string s = to_string(alg);
  if (reorth == ReorthMode::none && p > 0) s += "_noreorth";
  return s;
}

std::string MatrixSource::id() const {
  if (spec) return family_id(spec->family);
  return "file:" + path;
}

MatrixSource parse_matrix_source(std::string_view s) {
  MatrixSource src;
  if (s.substr(0, 5) == "file:") {
    src.path = std::string(s.substr(5));
    if (src.path.empty()) throw ValidationError("empty matrix file path");
    return src;
  }
  src.spec = default_spec(parse_family(s));
  return src;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (experiment == Experiment::cost_model) {
    if (cost_params.empty()) throw ValidationError("cost experiment needs parameter sets");
    return;
  }
  if (experiment == Experiment::speed) {
    if (n_grid.empty() || speed_k < 1 || speed_repeats < 1) throw ValidationError("speed grid is empty");
    return;
  }
  if (!matrix.spec && matrix.path.empty()) throw ValidationError("no matrix given");
  if (k_grid.empty()) {
    if (!tol_rel) throw ValidationError("k_grid is empty");
    if (!(*tol_rel > 0.0)) throw ValidationError("tol_rel must be positive");
    if (experiment != Experiment::accuracy) throw ValidationError("tolerance mode is only for accuracy");
  }
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1) throw ValidationError("k_grid entries must be >= 1");
    if (i && k_grid[i] <= k_grid[i - 1]) throw ValidationError("k_grid must be strictly increasing");
  }
  if (matrix.spec && !k_grid.empty() && k_grid.back() > std::min(matrix.spec->m, matrix.spec->n)) {
    throw ValidationError("k_grid exceeds min(m,n)");
  }
  for (const auto& a : algorithms) {
    if (a.is_blocked() && a.b < 1) throw ValidationError("block size must be >= 1");
    if (k_grid.empty() && (a.alg == AlgId::qb || a.alg == AlgId::qb_p || a.alg == AlgId::greedy)) {
      throw ValidationError(std::string(to_string(a.alg)) + " has no tolerance mode");
    }
  }
  if (experiment == Experiment::stats && scatter_trials > 0 && scatter_k < 1) {
    throw ValidationError("scatter needs k >= 1");
  }
}

ExperimentConfig default_config(Experiment e, const MatrixSource& src) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.matrix = src;
  std::size_t b = 10, k0 = 10, step = 10, k1 = 150;
  if (src.spec) {
    switch (src.spec->family) {
      case Family::fast_decay: k1 = 70; break;
      case Family::s_shaped: b = k0 = step = 15; break;
      case Family::kahan: b = k0 = step = 20; k1 = 200; break;
      default: break;
    }
    k1 = std::min(k1, std::min(src.spec->m, src.spec->n));
  }
  if (e == Experiment::skip_reorth) {
    k1 = std::min<std::size_t>(150, src.spec ? std::min(src.spec->m, src.spec->n) : 150);
    k0 = step = 10;
    if (cfg.matrix.spec) cfg.matrix.spec->params.sigma1 = 1.0;
    for (std::size_t p : {1, 2}) {
      for (ReorthMode r : {ReorthMode::full, ReorthMode::none}) {
        cfg.algorithms.push_back({AlgId::qb_p, p, 0, r});
        cfg.algorithms.push_back({AlgId::qb_pb, p, 10, r});
      }
    }
  } else if (e == Experiment::speed) {
    cfg.algorithms = {{AlgId::qb, 0, 0, ReorthMode::full},
                      {AlgId::qb_b, 0, 0, ReorthMode::full},
                      {AlgId::qb_pb, 1, 0, ReorthMode::full},
                      {AlgId::cpqr, 0, 0, ReorthMode::full}};
  } else if (e == Experiment::cost_model) {
    cfg.cost_params = {{1000, 1000, 100, 10, 0, 1, 1},
                       {1000, 1000, 100, 10, 1, 1, 1},
                       {4000, 2000, 200, 20, 2, 1, 1}};
  } else {
    for (std::size_t p : {0, 1, 2}) cfg.algorithms.push_back({AlgId::qb_pb, p, b, ReorthMode::full});
  }
  if (e == Experiment::stats) {
    cfg.trials = 25;
    cfg.scatter_k = 50;
  }
  for (std::size_t k = k0; k <= k1; k += step) cfg.k_grid.push_back(k);
  return cfg;
}

PreparedMatrix prepare_matrix(const MatrixSource& src, Exec exec) {
  PreparedMatrix pm;
  pm.id = src.id();
  if (src.spec) {
    GeneratedMatrix g = gen_test_matrix(*src.spec);
    pm.a = std::move(g.a);
    if (g.d) {
      pm.sigma = std::move(*g.d);
      pm.sigma_exact = true;
    }
  } else {
    pm.a = load_matrix_market(src.path);
  }
  if (pm.a.empty()) throw ValidationError("matrix " + pm.id + " is empty");
  if (!pm.a.all_finite()) throw ValidationError("matrix " + pm.id + " has non-finite entries");
  if (!pm.sigma_exact) pm.sigma = singular_values(pm.a, exec);
  pm.norm_fro = frobenius_norm(pm.a);
  pm.norm_spec = pm.sigma.size() ? pm.sigma[0] : 0.0;
  return pm;
}

std::vector<ErrorRecord> run_accuracy_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_accuracy_sweep(cfg, prepare_matrix(cfg.matrix, cfg.exec));
}

std::vector<ErrorRecord> run_accuracy_sweep(const ExperimentConfig& cfg, const PreparedMatrix& pm) {
  cfg.validate();
  return sweep(cfg, pm, true);
}

std::vector<ErrorRecord> run_skip_reorth(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_skip_reorth(cfg, prepare_matrix(cfg.matrix, cfg.exec));
}

std::vector<ErrorRecord> run_skip_reorth(const ExperimentConfig& cfg, const PreparedMatrix& pm) {
  cfg.validate();
  const bool has_power = std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(),
                                     [](const AlgorithmSpec& a) { return a.p > 0 && a.is_qb_family(); });
  if (!has_power) throw ValidationError("skip-reorth needs power-scheme algorithms");
  return sweep(cfg, pm, false);
}

StatsResult run_stats(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_stats(cfg, prepare_matrix(cfg.matrix, cfg.exec));
}

StatsResult run_stats(const ExperimentConfig& cfg, const PreparedMatrix& pm) {
  cfg.validate();
  std::vector<AlgorithmSpec> algs;
  for (const auto& a : cfg.algorithms)
    if (a.is_qb_family() || a.alg == AlgId::greedy) algs.push_back(a);
  if (algs.empty()) throw ValidationError("stats needs randomized algorithms");
  const RngStream base(cfg.base_seed);
  const bool fan_out = cfg.exec == Exec::parallel;

  // Trials run independently, each on its own child stream; results are
  // gathered per trial so the output order never depends on scheduling.
  auto run_trials = [&](std::size_t count, const std::vector<std::size_t>& ks) {
    std::vector<std::vector<ErrorRecord>> per(count);
    auto one = [&](std::size_t t) {
      const RngStream child = split_stream(base, t);
      for (const auto& a : algs) append_random_rows(cfg, pm, a, ks, child, t, Exec::serial, per[t]);
    };
    if (fan_out) {
#pragma omp parallel for schedule(dynamic)
      for (std::size_t t = 0; t < count; ++t) one(t);
    } else {
      for (std::size_t t = 0; t < count; ++t) one(t);
    }
    std::vector<ErrorRecord> flat;
    for (auto& v : per) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
  };

  StatsResult out;
  out.records = run_trials(cfg.trials, cfg.k_grid);
  out.summary = summarize(out.records);
  if (cfg.scatter_trials > 0) {
    const std::vector<std::size_t> ks{cfg.scatter_k};
    out.scatter = run_trials(cfg.scatter_trials, ks);
    append_cpqr_rows(pm, ks, cfg.exec, out.scatter);
    append_svd_rows(pm, ks, out.scatter);
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ErrorRecord>& records) {
  std::vector<SummaryRow> rows;
  std::map<std::tuple<std::string, std::size_t, std::size_t, std::size_t>, std::size_t> index;
  std::vector<double> ss_fro, ss_spec;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.algorithm, r.p, r.b, r.k);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back({r.algorithm, r.p, r.b, r.k, 0, 0.0, 0.0, std::nullopt, std::nullopt});
    }
    auto& row = rows[it->second];
    ++row.count;
    row.mean_fro += r.err_fro_rel;
    row.mean_spec += r.err_spec_rel;
  }
  for (auto& row : rows) {
    row.mean_fro /= static_cast<double>(row.count);
    row.mean_spec /= static_cast<double>(row.count);
  }
  ss_fro.assign(rows.size(), 0.0);
  ss_spec.assign(rows.size(), 0.0);
  for (const auto& r : records) {
    const std::size_t i = index.at(std::make_tuple(r.algorithm, r.p, r.b, r.k));
    ss_fro[i] += (r.err_fro_rel - rows[i].mean_fro) * (r.err_fro_rel - rows[i].mean_fro);
    ss_spec[i] += (r.err_spec_rel - rows[i].mean_spec) * (r.err_spec_rel - rows[i].mean_spec);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].count < 2) continue;
    const double dof = static_cast<double>(rows[i].count - 1);
    rows[i].std_fro = std::sqrt(ss_fro[i] / dof);
    rows[i].std_spec = std::sqrt(ss_spec[i] / dof);
  }
  return rows;
}

std::vector<SpeedRecord> run_speed_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SpeedRecord> out;
  for (const std::size_t n : cfg.n_grid) {
    RngStream gen(cfg.base_seed);
    const Matrix a = gaussian_matrix(gen, n, n);
    const std::size_t k = std::min(cfg.speed_k, n);
    for (std::size_t rep = 0; rep < cfg.speed_repeats; ++rep) {
      for (const auto& alg : cfg.algorithms) {
        std::vector<std::size_t> blocks{0};
        if (alg.is_blocked()) {
          blocks.clear();
          for (std::size_t b : cfg.b_grid)
            if (b <= k) blocks.push_back(b);
        }
        for (const std::size_t b : blocks) {
          SpeedRecord rec{alg.label(), alg.p, b, n, n, k, rep, 0.0, 0.0, 0.0};
          RngStream stream(cfg.base_seed + 1);
          const auto t0 = Clock::now();
          if (alg.alg == AlgId::cpqr) {
            cpqr_partial(a, k, true, cfg.exec);
          } else if (alg.alg == AlgId::svd || alg.alg == AlgId::greedy) {
            continue;
          } else {
            AlgorithmSpec spec = alg;
            spec.b = b;
            const QBFactors f = run_qb(spec, a, StopCriterion{0.0, k}, stream, cfg.exec);
            rec.matmul_ms = f.timings.matmul_ms;
            rec.orth_ms = f.timings.orth_ms;
          }
          rec.elapsed_ms = ms_since(t0);
          out.push_back(rec);
        }
      }
    }
  }
  return out;
}

}  // namespace rqb
