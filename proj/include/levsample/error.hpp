#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace levsample {

enum class ErrorCode {
  RankDeficient,
  DimensionMismatch,
  DegenerateScheme,
  InvalidLambda,
  InvalidFloor,
  InvalidSize,
  SingularSubsample,
  ZeroProbability,
  InvalidLevel,
  InvalidSpec,
  TooSmall,
  InvalidConfig,
  ParseError,
  NonNumeric,
  EmptyFile,
  IoError,
  NumericalFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Numerical failures (as opposed to bad input) map to CLI exit code 3.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the CSV reader; row and column are 1-based positions in the file.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t row, std::size_t column,
             const std::string& what)
      : Error(code, what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace levsample
