#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meshwave {

enum class ErrorCode {
  // mesh
  ParseError,
  NonTriangleFace,
  NonManifold,
  InconsistentOrientation,
  DegenerateTriangle,
  IndexOutOfRange,
  // curvature / operators
  IsolatedVertex,
  NegativeAlpha,
  FrameMeshMismatch,
  // spectrum
  FactorizationFailed,
  NotConverged,
  KTooLarge,
  // wavelets
  NegativeInput,
  NonpositiveCutoff,
  NonpositiveLambdaMax,
  SpectrumMismatch,
  ZeroColumnNorm,
  LengthMismatch,
  NotTightFrame,
  // network
  ShapeMismatch,
  SingleVertexShape,
  PermutationLengthMismatch,
  LabelOutOfRange,
  EmptyDataset,
  NonFiniteLoss,
  // corresp
  EmptyDescriptors,
  DimensionMismatch,
  DisconnectedMesh,
  // synth
  ResolutionTooSmall,
  MagnitudeOutOfRange,
  // cli / files
  ConfigInvalid,
  ManifestInvalid,
  MissingCache,
  FormatError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exit-code family used by the command line tool: 2 validation, 3 numerical, 4 I/O.
int exit_code_for(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace meshwave
