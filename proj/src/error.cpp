#include "cfp/error.hpp"

namespace cfp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnownedVariable: return "UnownedVariable";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidSet: return "InvalidSet";
    case ErrorCode::CompositeNoConverge: return "CompositeNoConverge";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyStatusList: return "EmptyStatusList";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::CalibrationDiverged: return "CalibrationDiverged";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

}  // namespace cfp
