#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "randqb/harness.hpp"

namespace rqb {
namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ValidationError("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void maybe(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

void read_params(const json& j, FamilyParams& p) {
  reject_unknown(j,
                 {"beta", "slow_rate", "density", "lead_weight", "lead_count", "zeta", "random_zeta",
                  "zeta_lo", "zeta_hi", "knee1", "knee2", "top_lo", "plateau", "sigma1"},
                 "matrix.params");
  maybe(j, "beta", p.beta);
  maybe(j, "slow_rate", p.slow_rate);
  maybe(j, "density", p.density);
  maybe(j, "lead_weight", p.lead_weight);
  maybe(j, "lead_count", p.lead_count);
  maybe(j, "zeta", p.zeta);
  maybe(j, "random_zeta", p.random_zeta);
  maybe(j, "zeta_lo", p.zeta_lo);
  maybe(j, "zeta_hi", p.zeta_hi);
  maybe(j, "knee1", p.knee1);
  maybe(j, "knee2", p.knee2);
  maybe(j, "top_lo", p.top_lo);
  maybe(j, "plateau", p.plateau);
  maybe(j, "sigma1", p.sigma1);
}

MatrixSource read_matrix(const json& j) {
  if (j.is_string()) return parse_matrix_source(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("config: matrix must be a string or an object");
  reject_unknown(j, {"family", "m", "n", "seed", "params", "file"}, "matrix");
  if (j.contains("file")) {
    MatrixSource src;
    src.path = j.at("file").get<std::string>();
    return src;
  }
  if (!j.contains("family")) throw ValidationError("config: matrix needs 'family' or 'file'");
  MatrixSource src = parse_matrix_source(j.at("family").get<std::string>());
  maybe(j, "m", src.spec->m);
  maybe(j, "n", src.spec->n);
  maybe(j, "seed", src.spec->seed);
  if (j.contains("params")) read_params(j.at("params"), src.spec->params);
  return src;
}

AlgorithmSpec read_alg(const json& j) {
  if (j.is_string()) return {parse_alg(j.get<std::string>()), 0, 10, ReorthMode::full};
  reject_unknown(j, {"alg", "P", "b", "reorth"}, "algorithms[]");
  AlgorithmSpec a;
  a.alg = parse_alg(j.at("alg").get<std::string>());
  maybe(j, "P", a.p);
  maybe(j, "b", a.b);
  if (j.contains("reorth")) {
    const auto r = j.at("reorth").get<std::string>();
    if (r == "full") {
      a.reorth = ReorthMode::full;
    } else if (r == "none") {
      a.reorth = ReorthMode::none;
    } else {
      throw ValidationError("config: reorth must be 'full' or 'none'");
    }
  }
  return a;
}

std::vector<std::size_t> read_grid(const json& j) {
  if (j.is_array()) return j.get<std::vector<std::size_t>>();
  reject_unknown(j, {"start", "stop", "step"}, "grid");
  const auto start = j.at("start").get<std::size_t>();
  const auto stop = j.at("stop").get<std::size_t>();
  const auto step = j.value("step", std::size_t{1});
  if (step == 0) throw ValidationError("config: grid step must be positive");
  std::vector<std::size_t> g;
  for (std::size_t k = start; k <= stop; k += step) g.push_back(k);
  return g;
}

CostParams read_cost(const json& j) {
  reject_unknown(j, {"m", "n", "ell", "b", "P", "c_mm", "c_qr"}, "cost[]");
  CostParams c;
  c.m = j.at("m").get<double>();
  c.n = j.at("n").get<double>();
  c.ell = j.at("ell").get<double>();
  c.b = j.at("b").get<double>();
  maybe(j, "P", c.p);
  maybe(j, "c_mm", c.c_mm);
  maybe(j, "c_qr", c.c_qr);
  return c;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  try {
    reject_unknown(j,
                   {"experiment", "matrix", "algorithms", "k_grid", "tol_rel", "oversampling", "trials",
                    "base_seed", "output", "format", "parallel", "scatter", "speed", "cost"},
                   "config");
    const Experiment e = parse_experiment(j.value("experiment", std::string("accuracy")));
    const MatrixSource src = j.contains("matrix") ? read_matrix(j.at("matrix")) : parse_matrix_source("m1");
    ExperimentConfig cfg = default_config(e, src);
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(read_alg(a));
    }
    if (j.contains("k_grid")) cfg.k_grid = read_grid(j.at("k_grid"));
    if (j.contains("tol_rel")) {
      cfg.tol_rel = j.at("tol_rel").get<double>();
      if (!j.contains("k_grid")) cfg.k_grid.clear();
    }
    maybe(j, "oversampling", cfg.oversampling);
    maybe(j, "trials", cfg.trials);
    maybe(j, "base_seed", cfg.base_seed);
    maybe(j, "output", cfg.output);
    if (j.contains("format")) cfg.format = parse_format(j.at("format").get<std::string>());
    if (j.value("parallel", false)) cfg.exec = Exec::parallel;
    if (j.contains("scatter")) {
      const auto& s = j.at("scatter");
      reject_unknown(s, {"k", "trials"}, "scatter");
      maybe(s, "k", cfg.scatter_k);
      maybe(s, "trials", cfg.scatter_trials);
    }
    if (j.contains("speed")) {
      const auto& s = j.at("speed");
      reject_unknown(s, {"n_grid", "b_grid", "k", "repeats"}, "speed");
      if (s.contains("n_grid")) cfg.n_grid = read_grid(s.at("n_grid"));
      if (s.contains("b_grid")) cfg.b_grid = read_grid(s.at("b_grid"));
      maybe(s, "k", cfg.speed_k);
      maybe(s, "repeats", cfg.speed_repeats);
    }
    if (j.contains("cost")) {
      cfg.cost_params.clear();
      for (const auto& c : j.at("cost")) cfg.cost_params.push_back(read_cost(c));
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace rqb
