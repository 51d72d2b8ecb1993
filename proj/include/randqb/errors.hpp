#pragma once

#include <stdexcept>
#include <string>

namespace rqb {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration; maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Numerical failures; map to CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A Householder pivot fell below the rank threshold.
class RankDeficient : public NumericalError {
 public:
  RankDeficient(const std::string& what, std::size_t column)
      : NumericalError(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class NearSingular : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rqb
