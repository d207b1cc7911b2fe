#include "dlqr/errors.hpp"

namespace dlqr {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonSquare: return "NonSquare";
    case ErrorCode::kSingularPencil: return "SingularPencil";
    case ErrorCode::kHigherIndex: return "HigherIndex";
    case ErrorCode::kProjectionFailure: return "ProjectionFailure";
    case ErrorCode::kAssumptionViolated: return "AssumptionViolated";
    case ErrorCode::kIncompatibleWeights: return "IncompatibleWeights";
    case ErrorCode::kSingularA0: return "SingularA0";
    case ErrorCode::kIntegrationFailure: return "IntegrationFailure";
    case ErrorCode::kNewtonFailure: return "NewtonFailure";
    case ErrorCode::kOutOfGrid: return "OutOfGrid";
    case ErrorCode::kGridMismatch: return "GridMismatch";
    case ErrorCode::kInadmissibleVariation: return "InadmissibleVariation";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kInconsistentInitialData: return "InconsistentInitialData";
    case ErrorCode::kInconsistentInput: return "InconsistentInput";
    case ErrorCode::kSingularClosedLoopCoupling:
      return "SingularClosedLoopCoupling";
    case ErrorCode::kSingularElliptic: return "SingularElliptic";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kSingularKkt: return "SingularKKT";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

ErrorCategory CategoryOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kDimensionMismatch:
      return ErrorCategory::kConfig;
    case ErrorCode::kNonSquare:
    case ErrorCode::kSingularPencil:
    case ErrorCode::kHigherIndex:
    case ErrorCode::kAssumptionViolated:
    case ErrorCode::kIncompatibleWeights:
    case ErrorCode::kSingularA0:
    case ErrorCode::kInconsistentInitialData:
    case ErrorCode::kInconsistentInput:
    case ErrorCode::kSingularElliptic:
    case ErrorCode::kInadmissibleVariation:
      return ErrorCategory::kAssumption;
    default:
      return ErrorCategory::kNumerical;
  }
}

}  // namespace dlqr
