#include "pmbobw/error.hpp"

namespace pmbobw {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kLossOutOfRange: return "LossOutOfRange";
    case ErrorCode::kEmptyGame: return "EmptyGame";
    case ErrorCode::kInvalidFeedback: return "InvalidFeedback";
    case ErrorCode::kUnknownCatalogName: return "UnknownCatalogName";
    case ErrorCode::kLpNumericalFailure: return "LpNumericalFailure";
    case ErrorCode::kDisconnectedNeighborGraph: return "DisconnectedNeighborGraph";
    case ErrorCode::kMissingWitness: return "MissingWitness";
    case ErrorCode::kInvalidWitness: return "InvalidWitness";
    case ErrorCode::kZeroProbabilityAction: return "ZeroProbabilityAction";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kDegenerateGame: return "DegenerateGame";
    case ErrorCode::kClassificationMismatch: return "ClassificationMismatch";
    case ErrorCode::kMissingPreCorruptionOutcomes: return "MissingPreCorruptionOutcomes";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

bool IsNumericError(ErrorCode code) {
  return code == ErrorCode::kLpNumericalFailure ||
         code == ErrorCode::kNonFiniteInput ||
         code == ErrorCode::kNonFiniteObjective ||
         code == ErrorCode::kInvariantViolation;
}

}  // namespace pmbobw
