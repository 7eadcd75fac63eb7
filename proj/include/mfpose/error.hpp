#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfpose {

enum class ErrorCode {
  DegenerateQuaternion,
  EmptyInput,
  NonFiniteCoordinate,
  NotNormalized,
  DimensionMismatch,
  NoRegularVoxels,
  ZeroWeightSum,
  NoCorrespondences,
  InvalidBounds,
  InvalidConfig,
  InfeasibleInit,
  AllInfeasible,
  TooFewSamples,
  BadMagic,
  TruncatedPayload,
  TrailingData,
  NonFiniteValue,
  InvalidValue,
  GeometryMismatch,
  InvalidSpec,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mfpose
