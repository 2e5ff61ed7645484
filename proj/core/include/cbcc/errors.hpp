#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbcc {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::size_t pivot_index, double pivot)
      : Error("matrix is not positive definite: pivot " +
              std::to_string(pivot_index) + " = " + std::to_string(pivot)),
        pivot_index_(pivot_index),
        pivot_(pivot) {}

  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_index_;
  double pivot_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual,
                    const std::string& what = "dimension mismatch")
      : Error(what + ": expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidReward : public Error {
 public:
  explicit InvalidReward(int reward)
      : Error("reward must be 0 or 1, got " + std::to_string(reward)) {}
};

// Raised when the emit -> act -> score round protocol is broken.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Anything wrong with an input data file. The CLI maps these to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& detail)
      : DataError("parse error at row " + std::to_string(row) + ", column " +
                  std::to_string(column) + ": " + detail),
        row_(row),
        column_(column) {}

  // 1-based line number in the source file and 0-based column index.
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class NonNumericFeature : public ParseError {
 public:
  NonNumericFeature(std::size_t row, std::size_t column, const std::string& token)
      : ParseError(row, column, "non-numeric feature value '" + token + "'") {}
};

class EmptyDataset : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace cbcc
