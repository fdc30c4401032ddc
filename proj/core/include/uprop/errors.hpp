#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uprop {

/// Tensor or vector dimensions disagree with what an operation expects.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the domain of a probabilistic function (e.g. a zero scale).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An index, horizon or window does not fit in the available data.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Invalid hyperparameters or run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data violates a precondition (e.g. missing values in training data).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV input. Carries the 1-based line number of the offending row.
class ParseError : public DataError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Too few scores to calibrate a threshold, or a score with nothing to score.
class CalibrationError : public DataError {
 public:
  using DataError::DataError;
};

/// A required model checkpoint does not exist.
class MissingCheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uprop
