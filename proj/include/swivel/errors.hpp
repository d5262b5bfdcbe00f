#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swivel {

enum class ErrorCode {
  NonSkewInput,
  GimbalLock,
  DegenerateP,
  TooFarFromSO3,
  SwivelSingularity,
  NonFiniteState,
  DegenerateThrust,
  NotCriticalPoint,
  NonHyperbolic,
  InvalidArgument,
  ParseError,
  IoError,
  UnknownParameter,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Scenario document error with the offending field and 1-based line (0 when
/// the error is not tied to a line, e.g. a cross-field constraint).
class ParseError : public Error {
 public:
  ParseError(std::string field, int line, const std::string& reason)
      : Error(ErrorCode::ParseError, format(field, line, reason)),
        field_(std::move(field)),
        line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& reason) {
    std::string s = "field '" + field + "'";
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    return s + ": " + reason;
  }

  std::string field_;
  int line_;
};

}  // namespace swivel
