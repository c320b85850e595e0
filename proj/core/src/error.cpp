#include "npcmaj/error.hpp"
#include "npcmaj/version.hpp"

namespace npcmaj {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NotProbabilityVector: return "NotProbabilityVector";
    case ErrorCode::NotRowStochastic: return "NotRowStochastic";
    case ErrorCode::NotDoublyStochastic: return "NotDoublyStochastic";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::MatchingFailed: return "MatchingFailed";
    case ErrorCode::NotEuclidean: return "NotEuclidean";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NoCertificate: return "NoCertificate";
    case ErrorCode::InvalidCertificate: return "InvalidCertificate";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::UnknownGauge: return "UnknownGauge";
    case ErrorCode::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

const char* library_version() noexcept { return NPCMAJ_VERSION; }

}  // namespace npcmaj
