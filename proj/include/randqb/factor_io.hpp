#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "randqb/postprocess.hpp"

namespace rqb {

enum class FactorKind : std::uint32_t { qb = 1, svd = 2, qr = 3, id = 4, cur = 5 };

const char* to_string(FactorKind k) noexcept;

// Named factor matrices in a fixed per-kind order. Index vectors and singular
// values are stored as n x 1 columns; indices are zero-based.
struct FactorBundle {
  FactorKind kind = FactorKind::qb;
  std::vector<std::pair<std::string, Matrix>> parts;

  const Matrix& at(const std::string& name) const;
};

FactorBundle bundle(const QBFactors& f);
FactorBundle bundle(const SVDFactors& f);
FactorBundle bundle(const PivotedQRFactors& f);
FactorBundle bundle(const IDFactors& f);
FactorBundle bundle(const CURFactors& f);

// Plain CSV, one row per matrix row, %.17g.
std::string format_csv_matrix(const Matrix& a);
Matrix parse_csv_matrix(const std::string& text);
void write_csv_matrix(const std::string& path, const Matrix& a);
Matrix read_csv_matrix(const std::string& path);

// One CSV file per part: <dir>/<name>.csv.
void write_factors_csv(const std::string& dir, const FactorBundle& b);

// "RQB1" container: magic, u32 kind, u32 part count, then per part u64 rows,
// u64 cols and the column-major little-endian doubles.
std::string encode_factors(const FactorBundle& b);
FactorBundle decode_factors(const std::string& bytes);
void write_factors_binary(const std::string& path, const FactorBundle& b);
FactorBundle read_factors_binary(const std::string& path);

}  // namespace rqb
