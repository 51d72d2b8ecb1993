#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "randqb/matrices.hpp"
#include "randqb/rand_qb.hpp"

namespace rqb {

enum class Experiment { accuracy, stats, skip_reorth, speed, cost_model };
enum class AlgId { qb, qb_b, qb_p, qb_pb, cpqr, svd, greedy };
enum class OutputFormat { csv, json };

const char* to_string(Experiment e) noexcept;
const char* to_string(AlgId a) noexcept;
Experiment parse_experiment(std::string_view s);
AlgId parse_alg(std::string_view s);
OutputFormat parse_format(std::string_view s);

struct AlgorithmSpec {
  AlgId alg = AlgId::qb_pb;
  std::size_t p = 0;
  std::size_t b = 10;
  ReorthMode reorth = ReorthMode::full;

  bool is_qb_family() const noexcept;
  bool is_blocked() const noexcept { return alg == AlgId::qb_b || alg == AlgId::qb_pb; }
  // Name used in output records, e.g. "qb_pb" or "qb_p_noreorth".
  std::string label() const;
};

// Either a generated test matrix or a Matrix Market file.
struct MatrixSource {
  std::optional<TestMatrixSpec> spec;
  std::string path;

  std::string id() const;
};

// Parses "m1".."m5" or "file:<path>".
MatrixSource parse_matrix_source(std::string_view s);

struct CostParams {
  double m = 0, n = 0, ell = 0, b = 0, p = 0;
  double c_mm = 1.0, c_qr = 1.0;
};

struct CostPrediction {
  double t_randqb = 0, t_randqb_b = 0, t_randqb_p = 0, t_randqb_pb = 0;
};

// Closed-form flop-weighted cost models; b must divide ell.
CostPrediction cost_model_predict(const CostParams& c);

struct ExperimentConfig {
  Experiment experiment = Experiment::accuracy;
  MatrixSource matrix;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::size_t> k_grid;
  // Adaptive mode: when set and k_grid is empty, QB-family runs stop at
  // tol_rel * ||A||_F and report the rank they reached.
  std::optional<double> tol_rel;
  // Extra samples beyond max k; 0 means the block size (10 for unblocked).
  std::size_t oversampling = 0;
  std::size_t trials = 1;
  std::uint64_t base_seed = 1;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  Exec exec = Exec::serial;

  // stats: fixed-k scatter (disabled when scatter_trials == 0)
  std::size_t scatter_k = 0;
  std::size_t scatter_trials = 0;

  // speed
  std::vector<std::size_t> n_grid{500, 1000, 2000};
  std::vector<std::size_t> b_grid{10, 20, 50};
  std::size_t speed_k = 100;
  std::size_t speed_repeats = 1;

  // cost
  std::vector<CostParams> cost_params;

  // Throws ValidationError on inconsistent settings.
  void validate() const;
};

// Default grids, block sizes and algorithm sets for the given matrix.
ExperimentConfig default_config(Experiment e, const MatrixSource& src);

struct ErrorRecord {
  std::string matrix_id;
  std::string algorithm;
  std::size_t p = 0;
  std::size_t b = 0;
  std::size_t k = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double err_fro_rel = 0.0;
  double err_spec_rel = 0.0;
  double elapsed_ms = 0.0;
};

struct SummaryRow {
  std::string algorithm;
  std::size_t p = 0;
  std::size_t b = 0;
  std::size_t k = 0;
  std::size_t count = 0;
  double mean_fro = 0.0;
  double mean_spec = 0.0;
  std::optional<double> std_fro;   // absent for a single trial
  std::optional<double> std_spec;
};

struct StatsResult {
  std::vector<ErrorRecord> records;   // per-trial paths
  std::vector<SummaryRow> summary;
  std::vector<ErrorRecord> scatter;   // fixed-k points, plus cpqr and svd references
};

struct SpeedRecord {
  std::string algorithm;
  std::size_t p = 0;
  std::size_t b = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t repeat = 0;
  double elapsed_ms = 0.0;
  double matmul_ms = 0.0;
  double orth_ms = 0.0;
};

// Loaded or generated matrix plus whatever reference data is known.
struct PreparedMatrix {
  std::string id;
  Matrix a;
  SingularValues sigma;   // exact when the generator retained it, else computed
  bool sigma_exact = false;
  double norm_fro = 0.0;
  double norm_spec = 0.0;
};

PreparedMatrix prepare_matrix(const MatrixSource& src, Exec exec = Exec::serial);

// Error curves for every algorithm, plus svd and cpqr reference rows.
std::vector<ErrorRecord> run_accuracy_sweep(const ExperimentConfig& cfg);
std::vector<ErrorRecord> run_accuracy_sweep(const ExperimentConfig& cfg, const PreparedMatrix& pm);

StatsResult run_stats(const ExperimentConfig& cfg);
StatsResult run_stats(const ExperimentConfig& cfg, const PreparedMatrix& pm);

// Same sweep as accuracy; the default algorithm set pairs every power
// variant with and without intermediate orthonormalization.
std::vector<ErrorRecord> run_skip_reorth(const ExperimentConfig& cfg);
std::vector<ErrorRecord> run_skip_reorth(const ExperimentConfig& cfg, const PreparedMatrix& pm);

std::vector<SpeedRecord> run_speed_bench(const ExperimentConfig& cfg);

// Per-k mean and standard deviation over trials.
std::vector<SummaryRow> summarize(const std::vector<ErrorRecord>& records);

// Output.
std::string records_csv(const std::vector<ErrorRecord>& r);
std::string records_json(const std::vector<ErrorRecord>& r);
std::string summary_csv(const std::vector<SummaryRow>& s);
std::string summary_json(const std::vector<SummaryRow>& s);
std::string speed_csv(const std::vector<SpeedRecord>& r);
std::string speed_json(const std::vector<SpeedRecord>& r);
std::string cost_csv(const std::vector<CostParams>& p, const std::vector<CostPrediction>& t);
std::string cost_json(const std::vector<CostParams>& p, const std::vector<CostPrediction>& t);

inline constexpr const char* kRecordsHeader =
    "matrix_id,algorithm,P,b,k,trial,seed,err_fro_rel,err_spec_rel,elapsed_ms";

// JSON experiment configuration; fields not present keep their defaults.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace rqb
