#pragma once

#include <stdexcept>
#include <string>

namespace saddlecheck {

enum class ErrorCode {
  NonSPD,
  NotSymmetric,
  DimensionMismatch,
  EmptyRange,
  BreakdownDetected,
  DeskScaleExceeded,
  IncompatibleFlags,
  IncompatibleSpaces,
  QbarSingular,
  HypothesisFailed,
  ParseError,
  ValidationError,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSPD: return "NonSPD";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::BreakdownDetected: return "BreakdownDetected";
    case ErrorCode::DeskScaleExceeded: return "DeskScaleExceeded";
    case ErrorCode::IncompatibleFlags: return "IncompatibleFlags";
    case ErrorCode::IncompatibleSpaces: return "IncompatibleSpaces";
    case ErrorCode::QbarSingular: return "QbarSingular";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace saddlecheck
