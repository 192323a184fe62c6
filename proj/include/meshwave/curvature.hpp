#pragma once

#include "meshwave/mesh.hpp"

namespace meshwave {

struct PrincipalFrames {
  Eigen::VectorXd k_min;
  Eigen::VectorXd k_max;       // k_max >= k_min
  Points dir_max;              // unit tangent, eigenvector of the larger-|k| eigenvalue
  Points normal;               // unit vertex normal
  std::vector<bool> umbilic;

  Index size() const noexcept { return k_min.size(); }
};

// Deterministic tangent direction used where curvature gives none: +x projected
// onto the plane with normal `n`, or +y when +x is (nearly) parallel to `n`.
Vec3 fallback_direction(const Vec3& n);

// Flips `d` so its first component with |c| > 1e-12 is positive.
Vec3 canonical_sign(const Vec3& d);

struct FrameOptions {
  // Averaging neighbourhood: the face 1-ring when <= 0, otherwise every face
  // connected to the vertex whose centroid lies within this distance, with
  // Gaussian weights of sigma = radius / 3.
  double radius = 0.0;
};

// Per-face second fundamental form fitted by least squares from vertex-normal
// differences along the three edges, rotated into each vertex tangent plane
// and averaged with face-area weights over the neighbourhood, then
// diagonalized per vertex.
PrincipalFrames estimate_frames(const TriMesh& mesh, const FrameOptions& options = {});

}  // namespace meshwave
