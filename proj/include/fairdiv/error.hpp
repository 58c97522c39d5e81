#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairdiv {

enum class ErrorCode {
  DimensionMismatch,
  NegativeValue,
  MalformedRational,
  IndexOutOfRange,
  SearchSpaceTooLarge,
  SupportTooLarge,
  NotSquare,
  InvalidArgument,
  InvalidConfig,
  IoFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::MalformedRational: return "MalformedRational";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

// Every domain failure in the library is reported as an Error carrying a code,
// so callers (the CLI in particular) can name the validation that failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairdiv
