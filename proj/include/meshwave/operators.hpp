#pragma once

#include "meshwave/curvature.hpp"
#include "meshwave/mesh.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace meshwave {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Anisotropy level and rotation away from the maximum-curvature direction.
struct AnisoConfig {
  double alpha = 0.0;
  double theta = 0.0;
  int direction_index = 0;
  int direction_count = 1;

  bool isotropic() const noexcept { return alpha == 0.0; }

  // Direction m of M: theta_m = m * pi / M (the tensor is pi-periodic in theta).
  static AnisoConfig direction(double alpha, int m, int count);
};

std::vector<double> direction_angles(int count);

struct OperatorPair {
  SparseMatrix stiffness;  // positive semi-definite discretization of -div(D grad)
  Eigen::VectorXd mass;    // lumped mixed-Voronoi areas
  AnisoConfig config;
  std::uint64_t mesh_hash = 0;

  Index size() const noexcept { return mass.size(); }
};

// R_theta * diag(1/(1+alpha), 1) * R_theta^T
Eigen::Matrix2d anisotropy_tensor(double alpha, double theta);

// Cotangent Laplacian: w_ij = -(cot b_ij + cot b'_ij)/2, diagonal = -row sum.
OperatorPair assemble_lbo(const TriMesh& mesh);

// Piecewise-linear FEM stiffness with a per-face conductivity tensor aligned
// to the face's curvature direction (average of the incident vertex dir_max,
// sign aligned to the first corner, projected into the face plane).
OperatorPair assemble_albo(const TriMesh& mesh, const PrincipalFrames& frames, const AnisoConfig& config);

// Unit in-plane anisotropy axis for every face (theta = 0 reference).
Points face_directions(const TriMesh& mesh, const PrincipalFrames& frames);

}  // namespace meshwave
