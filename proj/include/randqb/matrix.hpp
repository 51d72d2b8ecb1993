#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rqb {

// Dense real matrix, column-major. Submatrix access always copies.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  // Row-wise literal, convenient for small fixed inputs: {{1, 2}, {3, 4}}.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix diagonal(std::size_t rows, std::size_t cols, std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  Matrix cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
  Matrix rows_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }
  Matrix select_cols(std::span<const std::size_t> idx) const;
  Matrix select_rows(std::span<const std::size_t> idx) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& src);

  // Appending columns is cheap in column-major storage.
  void append_cols(const Matrix& other);
  static Matrix vstack(std::span<const Matrix> blocks);

  Matrix transpose() const;
  void scale(double alpha) noexcept;
  Matrix& operator-=(const Matrix& other);
  Matrix& operator+=(const Matrix& other);

  bool all_finite() const noexcept;
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator-(Matrix a, const Matrix& b);
Matrix operator+(Matrix a, const Matrix& b);

// Non-increasing, non-negative sequence of singular values.
class SingularValues {
 public:
  SingularValues() = default;
  // Throws ValidationError unless already sorted descending and non-negative.
  explicit SingularValues(std::vector<double> values);
  static SingularValues from_unsorted(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  SingularValues truncated(std::size_t k) const;

 private:
  std::vector<double> values_;
};

}  // namespace rqb
