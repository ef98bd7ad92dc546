#pragma once

#include <stdexcept>
#include <string>

namespace pmbobw {

enum class ErrorCode {
  kDimensionMismatch,
  kLossOutOfRange,
  kEmptyGame,
  kInvalidFeedback,
  kUnknownCatalogName,
  kLpNumericalFailure,
  kDisconnectedNeighborGraph,
  kMissingWitness,
  kInvalidWitness,
  kZeroProbabilityAction,
  kNonFiniteInput,
  kNonFiniteObjective,
  kDegenerateGame,
  kClassificationMismatch,
  kMissingPreCorruptionOutcomes,
  kEmptyInput,
  kInvalidArgument,
  kInvalidConfig,
  kIoError,
  kInvariantViolation,
};

const char* ErrorCodeName(ErrorCode code);

// Numeric failures map to CLI exit code 2, everything else to 1.
bool IsNumericError(ErrorCode code);

class PmError : public std::runtime_error {
 public:
  PmError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pmbobw
