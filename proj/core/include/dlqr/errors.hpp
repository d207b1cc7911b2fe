#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dlqr {

/// Failure classes raised by the library. Each maps onto one of two exit
/// categories in the scenario runner (assumption violation vs numerical
/// failure); configuration errors are raised by the runner itself.
enum class ErrorCode {
  kDimensionMismatch,
  kNonSquare,
  kSingularPencil,
  kHigherIndex,
  kProjectionFailure,
  kAssumptionViolated,
  kIncompatibleWeights,
  kSingularA0,
  kIntegrationFailure,
  kNewtonFailure,
  kOutOfGrid,
  kGridMismatch,
  kInadmissibleVariation,
  kNoConvergence,
  kInconsistentInitialData,
  kInconsistentInput,
  kSingularClosedLoopCoupling,
  kSingularElliptic,
  kTooLarge,
  kSingularKkt,
  kConfig,
};

enum class ErrorCategory { kConfig, kAssumption, kNumerical };

std::string_view ToString(ErrorCode code);
ErrorCategory CategoryOf(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return CategoryOf(code_); }

 private:
  ErrorCode code_;
};

// Short scientific rendering for error messages.
inline std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

[[noreturn]] inline void Throw(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace dlqr
