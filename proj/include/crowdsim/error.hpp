#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdsim {

enum class ErrorCode {
  kDegenerateVector,
  kDegenerateOverlap,
  kEmptyWorld,
  kRegionTooSmall,
  kParseError,
  kValidationError,
  kBadMagic,
  kVersionUnsupported,
  kTruncatedFrame,
  kIoError,
  kSuiteUnknown,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateVector: return "DEGENERATE_VECTOR";
    case ErrorCode::kDegenerateOverlap: return "DEGENERATE_OVERLAP";
    case ErrorCode::kEmptyWorld: return "EMPTY_WORLD";
    case ErrorCode::kRegionTooSmall: return "REGION_TOO_SMALL";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kValidationError: return "VALIDATION_ERROR";
    case ErrorCode::kBadMagic: return "BAD_MAGIC";
    case ErrorCode::kVersionUnsupported: return "VERSION_UNSUPPORTED";
    case ErrorCode::kTruncatedFrame: return "TRUNCATED_FRAME";
    case ErrorCode::kIoError: return "IO_ERROR";
    case ErrorCode::kSuiteUnknown: return "SUITE_UNKNOWN";
  }
  return "UNKNOWN";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crowdsim
