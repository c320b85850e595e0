#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace npcmaj {

enum class ErrorCode {
  InvalidPoint,
  SpaceMismatch,
  BaseMismatch,
  ParameterOutOfRange,
  InvalidMeasure,
  NonFinite,
  NotConverged,
  DimensionMismatch,
  LengthMismatch,
  EmptyInput,
  NotProbabilityVector,
  NotRowStochastic,
  NotDoublyStochastic,
  NotSquare,
  MatchingFailed,
  NotEuclidean,
  TooLarge,
  NoCertificate,
  InvalidCertificate,
  ArityMismatch,
  NotSymmetric,
  AlphaOutOfRange,
  UnknownGauge,
  PreconditionNotMet,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; `code()`
// identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace npcmaj
