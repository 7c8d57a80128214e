#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heatlab {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidInterval,
  kNegativeTime,
  kHorizonMismatch,
  kPrecisionExhausted,
  kNotApplicable,
  kNotControllableByProfile,
  kNotPointwiseControllable,
  kNotControllableInTruncation,
  kConstructionFailed,
  kEmptyGrid,
  kConfigInvalid,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidInterval: return "invalid-interval";
    case ErrorKind::kNegativeTime: return "negative-time";
    case ErrorKind::kHorizonMismatch: return "horizon-mismatch";
    case ErrorKind::kPrecisionExhausted: return "precision-exhausted";
    case ErrorKind::kNotApplicable: return "not-applicable";
    case ErrorKind::kNotControllableByProfile: return "not-controllable-by-this-profile";
    case ErrorKind::kNotPointwiseControllable: return "not-pointwise-controllable";
    case ErrorKind::kNotControllableInTruncation: return "not-controllable-in-truncation";
    case ErrorKind::kConstructionFailed: return "construction-failed";
    case ErrorKind::kEmptyGrid: return "empty-grid";
    case ErrorKind::kConfigInvalid: return "config-invalid";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind so
/// sweeps can record it as data instead of aborting.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace heatlab
