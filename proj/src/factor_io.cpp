#include "randqb/factor_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "randqb/errors.hpp"

namespace rqb {
namespace {

Matrix index_column(const std::vector<std::size_t>& idx) {
  Matrix m(idx.size(), 1);
  for (std::size_t i = 0; i < idx.size(); ++i) m(i, 0) = static_cast<double>(idx[i]);
  return m;
}

std::vector<std::string> part_names(FactorKind k) {
  switch (k) {
    case FactorKind::qb: return {"q", "b"};
    case FactorKind::svd: return {"u", "sigma", "v"};
    case FactorKind::qr: return {"q", "r", "pivots"};
    case FactorKind::id: return {"columns", "y"};
    case FactorKind::cur: return {"columns", "rows", "u_mid"};
  }
  throw ValidationError("unknown factor kind");
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void dump(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ValidationError("write failed for '" + path + "'");
}

template <class T>
void put_le(std::string& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ValidationError("factor container truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

const char* to_string(FactorKind k) noexcept {
  switch (k) {
    case FactorKind::qb: return "qb";
    case FactorKind::svd: return "svd";
    case FactorKind::qr: return "qr";
    case FactorKind::id: return "id";
    case FactorKind::cur: return "cur";
  }
  return "unknown";
}

const Matrix& FactorBundle::at(const std::string& name) const {
  for (const auto& [n, m] : parts)
    if (n == name) return m;
  throw ValidationError("factor bundle has no part '" + name + "'");
}

FactorBundle bundle(const QBFactors& f) { return {FactorKind::qb, {{"q", f.q}, {"b", f.b}}}; }

FactorBundle bundle(const SVDFactors& f) {
  Matrix s(f.sigma.size(), 1, f.sigma.values());
  return {FactorKind::svd, {{"u", f.u}, {"sigma", std::move(s)}, {"v", f.v}}};
}

FactorBundle bundle(const PivotedQRFactors& f) {
  return {FactorKind::qr, {{"q", f.q}, {"r", f.r}, {"pivots", index_column(f.pivots)}}};
}

FactorBundle bundle(const IDFactors& f) {
  return {FactorKind::id, {{"columns", index_column(f.column_indices)}, {"y", f.y}}};
}

FactorBundle bundle(const CURFactors& f) {
  return {FactorKind::cur,
          {{"columns", index_column(f.column_indices)},
           {"rows", index_column(f.row_indices)},
           {"u_mid", f.u_mid}}};
}

std::string format_csv_matrix(const Matrix& a) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Matrix parse_csv_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) throw ParseError("bad CSV cell '" + cell + "'", line_no);
      row.push_back(v);
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("ragged CSV row", line_no);
    rows.push_back(std::move(row));
  }
  const std::size_t m = rows.size();
  const std::size_t n = m ? rows.front().size() : 0;
  Matrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rows[i][j];
  return a;
}

void write_csv_matrix(const std::string& path, const Matrix& a) { dump(path, format_csv_matrix(a)); }

Matrix read_csv_matrix(const std::string& path) { return parse_csv_matrix(slurp(path)); }

void write_factors_csv(const std::string& dir, const FactorBundle& b) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, m] : b.parts) write_csv_matrix((std::filesystem::path(dir) / (name + ".csv")).string(), m);
}

std::string encode_factors(const FactorBundle& b) {
  std::string out = "RQB1";
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b.kind));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b.parts.size()));
  for (const auto& [name, m] : b.parts) {
    put_le<std::uint64_t>(out, m.rows());
    put_le<std::uint64_t>(out, m.cols());
    for (const double v : m.data()) put_le<double>(out, v);
  }
  return out;
}

FactorBundle decode_factors(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "RQB1") != 0) throw ValidationError("not an RQB1 container");
  std::size_t pos = 4;
  const auto kind_raw = get_le<std::uint32_t>(bytes, pos);
  if (kind_raw < 1 || kind_raw > 5) throw ValidationError("unknown factor kind " + std::to_string(kind_raw));
  FactorBundle b;
  b.kind = static_cast<FactorKind>(kind_raw);
  const auto names = part_names(b.kind);
  const auto count = get_le<std::uint32_t>(bytes, pos);
  if (count != names.size()) throw ValidationError("factor container has wrong part count");
  for (std::uint32_t p = 0; p < count; ++p) {
    const auto rows = get_le<std::uint64_t>(bytes, pos);
    const auto cols = get_le<std::uint64_t>(bytes, pos);
    if (cols != 0 && rows > (bytes.size() - pos) / 8 / cols) throw ValidationError("factor container truncated");
    Matrix m(rows, cols);
    for (double& v : m.data()) v = get_le<double>(bytes, pos);
    b.parts.emplace_back(names[p], std::move(m));
  }
  if (pos != bytes.size()) throw ValidationError("trailing bytes in factor container");
  return b;
}

void write_factors_binary(const std::string& path, const FactorBundle& b) { dump(path, encode_factors(b)); }

FactorBundle read_factors_binary(const std::string& path) { return decode_factors(slurp(path)); }

}  // namespace rqb
