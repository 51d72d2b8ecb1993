#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "randqb/errors.hpp"
#include "randqb/matrices.hpp"

namespace rqb {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t j = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > j) out.push_back(line.substr(j, i - j));
  }
  return out;
}

template <class T>
T number(std::string_view tok, std::size_t line_no, const char* what) {
  T v{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line_no);
  }
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next line that is neither blank nor a comment.
  bool next_data(std::string_view& line) {
    while (next(line)) {
      const auto t = tokens(line);
      if (!t.empty() && t.front().front() != '%') return true;
    }
    return false;
  }
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

}  // namespace

Matrix parse_matrix_market(std::string_view text) {
  LineReader in(text);
  std::string_view line;
  if (!in.next(line)) throw ParseError("empty file", 1);
  const auto head = tokens(line);
  if (head.size() != 5 || lower(head[0]) != "%%matrixmarket") {
    throw ParseError("missing %%MatrixMarket header", in.line_no());
  }
  if (lower(head[1]) != "matrix") throw ParseError("unsupported object '" + std::string(head[1]) + "'", 1);
  const std::string format = lower(head[2]);
  const std::string field = lower(head[3]);
  const std::string symmetry = lower(head[4]);
  if (format != "array" && format != "coordinate") {
    throw ParseError("unsupported format '" + std::string(head[2]) + "'", 1);
  }
  if (field != "real") {
    throw ParseError("unsupported field '" + std::string(head[3]) + "' (only real)", 1);
  }
  if (symmetry != "general") {
    throw ParseError("unsupported symmetry '" + std::string(head[4]) + "' (only general)", 1);
  }

  if (!in.next_data(line)) throw ParseError("missing size line", in.line_no() + 1);
  const auto size = tokens(line);
  const bool coord = format == "coordinate";
  if (size.size() != (coord ? 3u : 2u)) throw ParseError("malformed size line", in.line_no());
  const auto rows = number<std::size_t>(size[0], in.line_no(), "row count");
  const auto cols = number<std::size_t>(size[1], in.line_no(), "column count");
  Matrix a(rows, cols);

  if (!coord) {
    std::size_t k = 0;
    const std::size_t total = rows * cols;
    while (k < total && in.next_data(line)) {
      for (const auto tok : tokens(line)) {
        if (k == total) throw ParseError("too many values", in.line_no());
        a.data()[k++] = number<double>(tok, in.line_no(), "value");
      }
    }
    if (k != total) {
      throw ParseError("expected " + std::to_string(total) + " values, found " + std::to_string(k),
                       in.line_no());
    }
  } else {
    const auto nnz = number<std::size_t>(size[2], in.line_no(), "entry count");
    for (std::size_t e = 0; e < nnz; ++e) {
      if (!in.next_data(line)) {
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(e),
                         in.line_no());
      }
      const auto t = tokens(line);
      if (t.size() != 3) throw ParseError("entry needs row, column, value", in.line_no());
      const auto i = number<std::size_t>(t[0], in.line_no(), "row index");
      const auto j = number<std::size_t>(t[1], in.line_no(), "column index");
      if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("index out of range", in.line_no());
      a(i - 1, j - 1) += number<double>(t[2], in.line_no(), "value");
    }
  }
  if (in.next_data(line)) throw ParseError("trailing data", in.line_no());
  return a;
}

Matrix load_matrix_market(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_matrix_market(ss.str());
}

std::string format_matrix_market(const Matrix& a, MtxFormat format) {
  std::string out;
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  if (format == MtxFormat::array) {
    out += "%%MatrixMarket matrix array real general\n";
    out += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
    for (const double v : a.data()) {
      put(v);
      out += '\n';
    }
    return out;
  }
  std::size_t nnz = 0;
  for (const double v : a.data()) nnz += v != 0.0;
  out += "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + " " + std::to_string(nnz) + "\n";
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (a(i, j) == 0.0) continue;
      out += std::to_string(i + 1) + " " + std::to_string(j + 1) + " ";
      put(a(i, j));
      out += '\n';
    }
  }
  return out;
}

void write_matrix_market(const std::string& path, const Matrix& a, MtxFormat format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << format_matrix_market(a, format);
  if (!f) throw ValidationError("write failed for '" + path + "'");
}

}  // namespace rqb
