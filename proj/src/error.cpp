#include "mfpose/error.hpp"

namespace mfpose {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateQuaternion: return "DegenerateQuaternion";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoRegularVoxels: return "NoRegularVoxels";
    case ErrorCode::ZeroWeightSum: return "ZeroWeightSum";
    case ErrorCode::NoCorrespondences: return "NoCorrespondences";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InfeasibleInit: return "InfeasibleInit";
    case ErrorCode::AllInfeasible: return "AllInfeasible";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace mfpose
