#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cordscan {

enum class ErrorCode {
  // io
  UnsupportedFormat,
  CorruptHeader,
  IoFailure,
  LengthMismatch,
  NonNumericToken,
  InvalidScheme,
  // models
  RankDeficientDesign,
  InsufficientDirections,
  NonPositiveS0,
  DimensionMismatch,
  // phantom
  InvalidSpec,
  // regions
  EmptyRegion,
  MissingLesionMask,
  DuplicateRow,
  // stats
  InsufficientSamples,
  ZeroVariance,
  UnbalancedDesignUnderdetermined,
  // classify
  ZeroVarianceColumn,
  SingleClassTraining,
  SingularCovariance,
  SingleClassTest,
  TooFewRows,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes caused by bad input files or arguments rather than by the
/// numerical content of otherwise valid data.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace cordscan
