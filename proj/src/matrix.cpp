#include "randqb/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "randqb/errors.hpp"

namespace rqb {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionMismatch("matrix data length " + std::to_string(data_.size()) +
                            " does not match shape " + shape_string());
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
  Matrix m(nr, nc);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != nc) throw DimensionMismatch("ragged row literal");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) { return diagonal(d.size(), d.size(), d); }

Matrix Matrix::diagonal(std::size_t rows, std::size_t cols, std::span<const double> d) {
  Matrix m(rows, cols);
  const std::size_t r = std::min({rows, cols, d.size()});
  for (std::size_t i = 0; i < r; ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw DimensionMismatch("block out of range for " + shape_string());
  }
  Matrix out(nr, nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const double* src = data_.data() + (c0 + j) * rows_ + r0;
    std::copy(src, src + nr, out.data_.data() + j * nr);
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> idx) const {
  Matrix out(rows_, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= cols_) throw DimensionMismatch("column index out of range");
    std::ranges::copy(col(idx[j]), out.col(j).begin());
  }
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= rows_) throw DimensionMismatch("row index out of range");
  }
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t i = 0; i < idx.size(); ++i) out(i, j) = (*this)(idx[i], j);
  }
  return out;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
  if (r0 + src.rows_ > rows_ || c0 + src.cols_ > cols_) {
    throw DimensionMismatch("set_block: " + src.shape_string() + " does not fit in " +
                            shape_string());
  }
  for (std::size_t j = 0; j < src.cols_; ++j) {
    std::ranges::copy(src.col(j), data_.begin() + static_cast<std::ptrdiff_t>((c0 + j) * rows_ + r0));
  }
}

void Matrix::append_cols(const Matrix& other) {
  if (empty() && rows_ == 0) rows_ = other.rows_;
  if (other.rows_ != rows_) {
    throw DimensionMismatch("append_cols: " + other.shape_string() + " onto " + shape_string());
  }
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  cols_ += other.cols_;
}

Matrix Matrix::vstack(std::span<const Matrix> blocks) {
  std::size_t nr = 0;
  const std::size_t nc = blocks.empty() ? 0 : blocks.front().cols();
  for (const auto& b : blocks) {
    if (b.cols() != nc) throw DimensionMismatch("vstack: column counts differ");
    nr += b.rows();
  }
  Matrix out(nr, nc);
  std::size_t r0 = 0;
  for (const auto& b : blocks) {
    out.set_block(r0, 0, b);
    r0 += b.rows();
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  constexpr std::size_t tile = 32;
  for (std::size_t jj = 0; jj < cols_; jj += tile) {
    for (std::size_t ii = 0; ii < rows_; ii += tile) {
      const std::size_t je = std::min(cols_, jj + tile);
      const std::size_t ie = std::min(rows_, ii + tile);
      for (std::size_t j = jj; j < je; ++j) {
        for (std::size_t i = ii; i < ie; ++i) t(j, i) = (*this)(i, j);
      }
    }
  }
  return t;
}

void Matrix::scale(double alpha) noexcept {
  for (double& v : data_) v *= alpha;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionMismatch("subtract: " + shape_string() + " vs " + other.shape_string());
  }
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(), std::minus<>());
  return *this;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionMismatch("add: " + shape_string() + " vs " + other.shape_string());
  }
  std::transform(data_.begin(), data_.end(), other.data_.begin(), data_.begin(), std::plus<>());
  return *this;
}

bool Matrix::all_finite() const noexcept {
  return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator+(Matrix a, const Matrix& b) { return a += b; }

SingularValues::SingularValues(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0)) throw ValidationError("singular values must be non-negative");
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw ValidationError("singular values must be non-increasing");
    }
  }
}

SingularValues SingularValues::from_unsorted(std::vector<double> values) {
  std::ranges::sort(values, std::greater<>());
  return SingularValues(std::move(values));
}

SingularValues SingularValues::truncated(std::size_t k) const {
  return SingularValues(
      std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(std::min(k, values_.size()))));
}

}  // namespace rqb
