#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "randqb/baselines.hpp"
#include "randqb/factor_io.hpp"
#include "randqb/harness.hpp"
#include "randqb/matrices.hpp"
#include "randqb/postprocess.hpp"
#include "randqb/rand_qb.hpp"

namespace {

using namespace rqb;
using ordered_json = nlohmann::ordered_json;

struct FactorizeArgs {
  std::string input;
  std::string alg = "qb_b";
  std::optional<std::size_t> rank;
  std::optional<double> tol_rel;
  std::size_t block = 10;
  std::size_t power = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string post = "none";
  std::string reorth = "full";
  bool no_reproject = false;
  bool parallel = false;
};

struct BenchArgs {
  std::optional<std::string> experiment;
  std::optional<std::string> matrix;
  std::string config;
  std::optional<std::string> format;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  bool parallel = false;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ValidationError("write failed for '" + path + "'");
}

// <out>.<tag>.<ext> next to the main output.
std::string sidecar(const std::string& out, const std::string& tag, OutputFormat fmt) {
  std::filesystem::path p(out);
  const std::string ext = fmt == OutputFormat::csv ? ".csv" : ".json";
  return (p.parent_path() / (p.stem().string() + "." + tag + ext)).string();
}

void save_bundle(const std::string& dir, const FactorBundle& b) {
  write_factors_csv(dir, b);
  write_factors_binary((std::filesystem::path(dir) / (std::string(to_string(b.kind)) + ".rqb")).string(), b);
}

int run_factorize(const FactorizeArgs& args) {
  const Exec exec = args.parallel ? Exec::parallel : Exec::serial;
  const Matrix a = load_matrix_market(args.input);
  if (a.empty()) throw ValidationError("input matrix is empty");
  if (!a.all_finite()) throw ValidationError("input matrix has non-finite entries");
  const double a_norm = frobenius_norm(a);
  const std::size_t full = std::min(a.rows(), a.cols());
  if (args.rank && (*args.rank < 1 || *args.rank > full)) {
    throw ValidationError("--rank must lie in [1, " + std::to_string(full) + "]");
  }
  if (args.tol_rel && !(*args.tol_rel > 0.0)) throw ValidationError("--tol-rel must be positive");
  ReorthMode mode = ReorthMode::full;
  if (args.reorth == "none") mode = ReorthMode::none;

  ordered_json report;
  report["input"] = args.input;
  report["rows"] = a.rows();
  report["cols"] = a.cols();
  report["alg"] = args.alg;
  std::filesystem::create_directories(args.out);
  const auto t0 = std::chrono::steady_clock::now();

  if (args.alg == "cpqr" || args.alg == "svd") {
    if (args.post != "none") throw ValidationError("--post applies to QB algorithms only");
    if (args.alg == "cpqr") {
      if (!args.rank) throw ValidationError("cpqr needs --rank");
      const PivotedQRFactors f = cpqr_partial(a, *args.rank, true, exec);
      Matrix e = a;
      Matrix h;
      gemm(1.0, f.q, Op::trans, a, Op::none, 0.0, h, exec);
      gemm(-1.0, f.q, Op::none, h, Op::none, 1.0, e, exec);
      report["rank"] = f.q.cols();
      report["residual_fro_rel"] = frobenius_norm(e) / a_norm;
      save_bundle(args.out, bundle(f));
    } else {
      JacobiOptions opts;
      opts.exec = exec;
      const SVDFactors full_svd = jacobi_svd(a, opts);
      std::size_t k = args.rank.value_or(full_svd.k);
      if (args.tol_rel && !args.rank) {
        const auto& s = full_svd.sigma.values();
        double tail2 = 0.0;
        k = s.size();
        while (k > 0 && std::sqrt(tail2 + s[k - 1] * s[k - 1]) <= *args.tol_rel * a_norm) {
          tail2 += s[k - 1] * s[k - 1];
          --k;
        }
      }
      const SVDFactors f = truncate_svd(full_svd, k);
      report["rank"] = k;
      report["residual_fro_rel"] = optimal_errors(full_svd.sigma, k).fro / a_norm;
      save_bundle(args.out, bundle(f));
    }
  } else {
    const AlgId alg = parse_alg(args.alg);
    RngStream stream(args.seed);
    QBFactors qb;
    if (alg == AlgId::qb || alg == AlgId::qb_p) {
      if (!args.rank) throw ValidationError(args.alg + " needs --rank");
      if (args.tol_rel) throw ValidationError(args.alg + " is fixed-rank; use qb_b or qb_pb for --tol-rel");
      qb = rand_qb_p(a, *args.rank, alg == AlgId::qb ? 0 : args.power, stream, mode, exec);
    } else {
      if (!args.rank && !args.tol_rel) throw ValidationError(args.alg + " needs --rank or --tol-rel");
      StopCriterion stop;
      stop.max_rank = args.rank.value_or(0);
      stop.epsilon = args.tol_rel.value_or(0.0) * a_norm;
      qb = rand_qb_pb(a, stop, alg == AlgId::qb_b ? 0 : args.power, args.block, stream, mode,
                      !args.no_reproject, exec);
    }
    Matrix e = a;
    gemm(-1.0, qb.q, Op::none, qb.b, Op::none, 1.0, e, exec);
    report["rank"] = qb.rank();
    report["stopped_by"] = to_string(qb.stopped_by);
    report["residual_fro_rel"] = frobenius_norm(e) / a_norm;
    report["residual_history"] = qb.residual_history;
    report["matmul_ms"] = qb.timings.matmul_ms;
    report["orth_ms"] = qb.timings.orth_ms;
    save_bundle(args.out, bundle(qb));

    const std::size_t k = args.rank.value_or(qb.rank());
    if (args.post == "svd") {
      save_bundle(args.out, bundle(qb_to_svd(qb, args.tol_rel && !args.rank
                                                       ? RankRule::tolerance(*args.tol_rel * a_norm)
                                                       : RankRule::fixed(std::min(k, qb.rank())),
                                             exec)));
    } else if (args.post == "qr") {
      save_bundle(args.out, bundle(qb_to_qr(qb, exec)));
    } else if (args.post == "id") {
      const IDFactors id = qb_to_id(qb, std::min(k, qb.rank()));
      report["id_max_abs_y"] = id.max_abs_y;
      save_bundle(args.out, bundle(id));
    } else if (args.post == "cur") {
      save_bundle(args.out, bundle(qb_to_cur(qb, a, std::min(k, qb.rank()), exec)));
    }
  }
  report["elapsed_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_bench(const BenchArgs& args) {
  ExperimentConfig cfg;
  if (!args.config.empty()) {
    cfg = load_experiment_config(args.config);
    if (args.matrix) cfg.matrix = parse_matrix_source(*args.matrix);
    if (args.experiment) cfg.experiment = parse_experiment(*args.experiment);
  } else {
    cfg = default_config(parse_experiment(args.experiment.value_or("accuracy")),
                         parse_matrix_source(args.matrix.value_or("m1")));
  }
  if (args.format) cfg.format = parse_format(*args.format);
  if (!args.out.empty()) cfg.output = args.out;
  if (args.seed) cfg.base_seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  if (args.parallel) cfg.exec = Exec::parallel;
  cfg.validate();
  const bool csv = cfg.format == OutputFormat::csv;

  switch (cfg.experiment) {
    case Experiment::accuracy: {
      const auto r = run_accuracy_sweep(cfg);
      write_text(cfg.output, csv ? records_csv(r) : records_json(r));
      break;
    }
    case Experiment::skip_reorth: {
      const auto r = run_skip_reorth(cfg);
      write_text(cfg.output, csv ? records_csv(r) : records_json(r));
      break;
    }
    case Experiment::stats: {
      const StatsResult s = run_stats(cfg);
      write_text(cfg.output, csv ? records_csv(s.records) : records_json(s.records));
      if (!cfg.output.empty() && cfg.output != "-") {
        write_text(sidecar(cfg.output, "summary", cfg.format), csv ? summary_csv(s.summary) : summary_json(s.summary));
        if (!s.scatter.empty()) {
          write_text(sidecar(cfg.output, "scatter", cfg.format), csv ? records_csv(s.scatter) : records_json(s.scatter));
        }
      }
      break;
    }
    case Experiment::speed: {
      const auto r = run_speed_bench(cfg);
      write_text(cfg.output, csv ? speed_csv(r) : speed_json(r));
      break;
    }
    case Experiment::cost_model: {
      std::vector<CostPrediction> t;
      for (const auto& c : cfg.cost_params) t.push_back(cost_model_predict(c));
      write_text(cfg.output, csv ? cost_csv(cfg.cost_params, t) : cost_json(cfg.cost_params, t));
      break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized blocked QB factorizations and experiment harness"};
  app.require_subcommand(1);

  FactorizeArgs fa;
  auto* fac = app.add_subcommand("factorize", "Factorize a Matrix Market file");
  fac->add_option("--input", fa.input, "Matrix Market file")->required();
  fac->add_option("--alg", fa.alg, "Algorithm")
      ->check(CLI::IsMember({"qb", "qb_b", "qb_p", "qb_pb", "cpqr", "svd"}));
  auto* rank_opt = fac->add_option("--rank", fa.rank, "Target rank (max rank for blocked)");
  fac->add_option("--tol-rel", fa.tol_rel, "Stop when ||A - QB||_F <= tol * ||A||_F")->excludes(rank_opt);
  fac->add_option("--block", fa.block, "Block size")->check(CLI::PositiveNumber);
  fac->add_option("--power", fa.power, "Power iterations P");
  fac->add_option("--seed", fa.seed, "Random seed");
  fac->add_option("--out", fa.out, "Output directory")->required();
  fac->add_option("--post", fa.post, "Post-processing")->check(CLI::IsMember({"none", "svd", "qr", "id", "cur"}));
  fac->add_option("--reorth", fa.reorth, "Intermediate orthonormalization")->check(CLI::IsMember({"full", "none"}));
  fac->add_flag("--no-reproject", fa.no_reproject, "Skip reprojection against earlier blocks");
  fac->add_flag("--parallel", fa.parallel, "Use OpenMP kernels");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run an experiment and emit records");
  bench->add_option("--experiment", ba.experiment, "accuracy|stats|skip-reorth|speed|cost")
      ->check(CLI::IsMember({"accuracy", "stats", "skip-reorth", "speed", "cost"}));
  bench->add_option("--matrix", ba.matrix, "m1..m5 or file:<path>");
  bench->add_option("--config", ba.config, "JSON experiment configuration");
  bench->add_option("--format", ba.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", ba.out, "Output path (stdout when omitted)");
  bench->add_option("--seed", ba.seed, "Base seed");
  bench->add_option("--trials", ba.trials, "Trials (stats)");
  bench->add_flag("--parallel", ba.parallel, "Use OpenMP kernels / parallel trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*fac) return run_factorize(fa);
    return run_bench(ba);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
