#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spikekit {

// Stable numeric values; external wrappers branch on them.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kOutOfRange = 3,
  kBadMagic = 10,
  kUnsupportedVersion = 11,
  kTruncated = 12,
  kNonzeroPadding = 13,
  kMalformedHeader = 14,
  kUnsupportedMaxval = 15,
  kIo = 20,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported version";
    case ErrorCode::kTruncated: return "truncated payload";
    case ErrorCode::kNonzeroPadding: return "nonzero padding bits";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kUnsupportedMaxval: return "unsupported maxval";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // True for errors caused by file contents or the filesystem rather than by
  // caller-supplied parameters.
  bool is_format_error() const noexcept { return static_cast<int>(code_) >= 10; }

 private:
  ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace spikekit
