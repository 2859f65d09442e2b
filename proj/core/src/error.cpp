#include "cordscan/error.hpp"

namespace cordscan {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonNumericToken: return "NonNumericToken";
    case ErrorCode::InvalidScheme: return "InvalidScheme";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::InsufficientDirections: return "InsufficientDirections";
    case ErrorCode::NonPositiveS0: return "NonPositiveS0";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::MissingLesionMask: return "MissingLesionMask";
    case ErrorCode::DuplicateRow: return "DuplicateRow";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::UnbalancedDesignUnderdetermined: return "UnbalancedDesignUnderdetermined";
    case ErrorCode::ZeroVarianceColumn: return "ZeroVarianceColumn";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::SingleClassTest: return "SingleClassTest";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CorruptHeader:
    case ErrorCode::IoFailure:
    case ErrorCode::LengthMismatch:
    case ErrorCode::NonNumericToken:
    case ErrorCode::InvalidScheme:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidSpec:
    case ErrorCode::MissingLesionMask:
    case ErrorCode::DuplicateRow:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace cordscan
