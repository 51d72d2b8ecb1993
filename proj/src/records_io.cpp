#include <cstdio>

#include <json.hpp>

#include "randqb/harness.hpp"

namespace rqb {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

std::string records_csv(const std::vector<ErrorRecord>& r) {
  std::string out = std::string(kRecordsHeader) + "\n";
  for (const auto& e : r) {
    out += e.matrix_id + "," + e.algorithm + "," + std::to_string(e.p) + "," + std::to_string(e.b) + "," +
           std::to_string(e.k) + "," + std::to_string(e.trial) + "," + std::to_string(e.seed) + "," +
           num(e.err_fro_rel) + "," + num(e.err_spec_rel) + "," + num(e.elapsed_ms) + "\n";
  }
  return out;
}

std::string records_json(const std::vector<ErrorRecord>& r) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : r) {
    arr.push_back({{"matrix_id", e.matrix_id},
                   {"algorithm", e.algorithm},
                   {"P", e.p},
                   {"b", e.b},
                   {"k", e.k},
                   {"trial", e.trial},
                   {"seed", e.seed},
                   {"err_fro_rel", e.err_fro_rel},
                   {"err_spec_rel", e.err_spec_rel},
                   {"elapsed_ms", e.elapsed_ms}});
  }
  return arr.dump(1) + "\n";
}

std::string summary_csv(const std::vector<SummaryRow>& s) {
  std::string out = "algorithm,P,b,k,count,mean_fro,std_fro,mean_spec,std_spec\n";
  for (const auto& r : s) {
    out += r.algorithm + "," + std::to_string(r.p) + "," + std::to_string(r.b) + "," + std::to_string(r.k) +
           "," + std::to_string(r.count) + "," + num(r.mean_fro) + "," + opt_num(r.std_fro) + "," +
           num(r.mean_spec) + "," + opt_num(r.std_spec) + "\n";
  }
  return out;
}

std::string summary_json(const std::vector<SummaryRow>& s) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : s) {
    arr.push_back({{"algorithm", r.algorithm},
                   {"P", r.p},
                   {"b", r.b},
                   {"k", r.k},
                   {"count", r.count},
                   {"mean_fro", r.mean_fro},
                   {"std_fro", opt_json(r.std_fro)},
                   {"mean_spec", r.mean_spec},
                   {"std_spec", opt_json(r.std_spec)}});
  }
  return arr.dump(1) + "\n";
}

std::string speed_csv(const std::vector<SpeedRecord>& r) {
  std::string out = "algorithm,P,b,m,n,k,repeat,elapsed_ms,matmul_ms,orth_ms\n";
  for (const auto& e : r) {
    out += e.algorithm + "," + std::to_string(e.p) + "," + std::to_string(e.b) + "," + std::to_string(e.m) +
           "," + std::to_string(e.n) + "," + std::to_string(e.k) + "," + std::to_string(e.repeat) + "," +
           num(e.elapsed_ms) + "," + num(e.matmul_ms) + "," + num(e.orth_ms) + "\n";
  }
  return out;
}

std::string speed_json(const std::vector<SpeedRecord>& r) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : r) {
    arr.push_back({{"algorithm", e.algorithm},
                   {"P", e.p},
                   {"b", e.b},
                   {"m", e.m},
                   {"n", e.n},
                   {"k", e.k},
                   {"repeat", e.repeat},
                   {"elapsed_ms", e.elapsed_ms},
                   {"matmul_ms", e.matmul_ms},
                   {"orth_ms", e.orth_ms}});
  }
  return arr.dump(1) + "\n";
}

std::string cost_csv(const std::vector<CostParams>& p, const std::vector<CostPrediction>& t) {
  std::string out = "m,n,ell,b,P,c_mm,c_qr,t_randqb,t_randqb_b,t_randqb_p,t_randqb_pb\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += num(p[i].m) + "," + num(p[i].n) + "," + num(p[i].ell) + "," + num(p[i].b) + "," + num(p[i].p) +
           "," + num(p[i].c_mm) + "," + num(p[i].c_qr) + "," + num(t[i].t_randqb) + "," +
           num(t[i].t_randqb_b) + "," + num(t[i].t_randqb_p) + "," + num(t[i].t_randqb_pb) + "\n";
  }
  return out;
}

std::string cost_json(const std::vector<CostParams>& p, const std::vector<CostPrediction>& t) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < p.size(); ++i) {
    arr.push_back({{"m", p[i].m},
                   {"n", p[i].n},
                   {"ell", p[i].ell},
                   {"b", p[i].b},
                   {"P", p[i].p},
                   {"c_mm", p[i].c_mm},
                   {"c_qr", p[i].c_qr},
                   {"t_randqb", t[i].t_randqb},
                   {"t_randqb_b", t[i].t_randqb_b},
                   {"t_randqb_p", t[i].t_randqb_p},
                   {"t_randqb_pb", t[i].t_randqb_pb}});
  }
  return arr.dump(1) + "\n";
}

}  // namespace rqb
