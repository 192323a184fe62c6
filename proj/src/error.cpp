#include "meshwave/error.hpp"

namespace meshwave {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonTriangleFace: return "NonTriangleFace";
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::IsolatedVertex: return "IsolatedVertex";
    case ErrorCode::NegativeAlpha: return "NegativeAlpha";
    case ErrorCode::FrameMeshMismatch: return "FrameMeshMismatch";
    case ErrorCode::FactorizationFailed: return "FactorizationFailed";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::NonpositiveCutoff: return "NonpositiveCutoff";
    case ErrorCode::NonpositiveLambdaMax: return "NonpositiveLambdaMax";
    case ErrorCode::SpectrumMismatch: return "SpectrumMismatch";
    case ErrorCode::ZeroColumnNorm: return "ZeroColumnNorm";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotTightFrame: return "NotTightFrame";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingleVertexShape: return "SingleVertexShape";
    case ErrorCode::PermutationLengthMismatch: return "PermutationLengthMismatch";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::EmptyDescriptors: return "EmptyDescriptors";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DisconnectedMesh: return "DisconnectedMesh";
    case ErrorCode::ResolutionTooSmall: return "ResolutionTooSmall";
    case ErrorCode::MagnitudeOutOfRange: return "MagnitudeOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ManifestInvalid: return "ManifestInvalid";
    case ErrorCode::MissingCache: return "MissingCache";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FactorizationFailed:
    case ErrorCode::NotConverged:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::ZeroColumnNorm:
      return 3;
    case ErrorCode::MissingCache:
    case ErrorCode::FormatError:
    case ErrorCode::IoError:
      return 4;
    default:
      return 2;
  }
}

}  // namespace meshwave
