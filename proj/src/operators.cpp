#include "meshwave/operators.hpp"

#include "meshwave/error.hpp"

#include <cmath>
#include <numbers>

namespace meshwave {

namespace {

// Symmetric triplets for i != j entries; the diagonal is set to minus the
// off-diagonal row sum so constants are exactly in the kernel.
SparseMatrix from_offdiagonal(Index n, std::vector<Eigen::Triplet<double>>& triplets) {
  SparseMatrix off(n, n);
  off.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);
  for (Index col = 0; col < off.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(off, col); it; ++it) row_sum[it.row()] += it.value();
  }
  triplets.clear();
  triplets.reserve(static_cast<std::size_t>(off.nonZeros() + n));
  for (Index col = 0; col < off.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(off, col); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
  }
  for (Index i = 0; i < n; ++i) triplets.emplace_back(i, i, -row_sum[i]);
  SparseMatrix out(n, n);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

}  // namespace

AnisoConfig AnisoConfig::direction(double alpha, int m, int count) {
  AnisoConfig cfg;
  cfg.alpha = alpha;
  cfg.theta = m * std::numbers::pi / count;
  cfg.direction_index = m;
  cfg.direction_count = count;
  return cfg;
}

std::vector<double> direction_angles(int count) {
  std::vector<double> angles(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) angles[static_cast<std::size_t>(m)] = m * std::numbers::pi / count;
  return angles;
}

Eigen::Matrix2d anisotropy_tensor(double alpha, double theta) {
  if (alpha < 0.0) throw Error(ErrorCode::NegativeAlpha, "alpha = " + std::to_string(alpha));
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  const Eigen::Vector2d diag(1.0 / (1.0 + alpha), 1.0);
  Eigen::Matrix2d d = rot * diag.asDiagonal() * rot.transpose();
  d(1, 0) = d(0, 1);
  return d;
}

OperatorPair assemble_lbo(const TriMesh& mesh) {
  const Index n = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.face_count()) * 6);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const int idx[3] = {mesh.faces()(f, 0), mesh.faces()(f, 1), mesh.faces()(f, 2)};
    for (int c = 0; c < 3; ++c) {
      const Vec3 corner = mesh.vertex(idx[c]);
      const int i = idx[(c + 1) % 3];
      const int j = idx[(c + 2) % 3];
      const Vec3 u = mesh.vertex(i) - corner;
      const Vec3 v = mesh.vertex(j) - corner;
      const double w = -0.5 * u.dot(v) / u.cross(v).norm();
      triplets.emplace_back(i, j, w);
      triplets.emplace_back(j, i, w);
    }
  }
  OperatorPair ops;
  ops.stiffness = from_offdiagonal(n, triplets);
  ops.mass = mesh.mass();
  ops.mesh_hash = mesh.hash();
  return ops;
}

Points face_directions(const TriMesh& mesh, const PrincipalFrames& frames) {
  Points dirs(mesh.face_count(), 3);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const Vec3 n = mesh.face_normals().row(f).transpose();
    const Vec3 first = frames.dir_max.row(mesh.faces()(f, 0)).transpose();
    Vec3 sum = first;
    for (int c = 1; c < 3; ++c) {
      const Vec3 d = frames.dir_max.row(mesh.faces()(f, c)).transpose();
      sum += d.dot(first) < 0.0 ? Vec3(-d) : d;
    }
    Vec3 d = sum / 3.0;
    d -= d.dot(n) * n;
    dirs.row(f) = (d.norm() < 1e-8 ? fallback_direction(n) : d.normalized()).transpose();
  }
  return dirs;
}

OperatorPair assemble_albo(const TriMesh& mesh, const PrincipalFrames& frames, const AnisoConfig& config) {
  if (config.alpha < 0.0) throw Error(ErrorCode::NegativeAlpha, "alpha = " + std::to_string(config.alpha));
  if (frames.size() != mesh.vertex_count()) {
    throw Error(ErrorCode::FrameMeshMismatch, "frames for " + std::to_string(frames.size()) + " vertices, mesh has " +
                                                  std::to_string(mesh.vertex_count()));
  }
  const Index n = mesh.vertex_count();
  const Points dirs = face_directions(mesh, frames);
  const Eigen::Matrix2d d2 = anisotropy_tensor(config.alpha, config.theta);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.face_count()) * 6);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const int idx[3] = {mesh.faces()(f, 0), mesh.faces()(f, 1), mesh.faces()(f, 2)};
    const Vec3 p[3] = {mesh.vertex(idx[0]), mesh.vertex(idx[1]), mesh.vertex(idx[2])};
    const Vec3 n_f = mesh.face_normals().row(f).transpose();
    const double area = mesh.face_areas()[f];
    const Vec3 e1 = dirs.row(f).transpose();
    const Vec3 e2 = n_f.cross(e1);

    // Hat-function gradients in the face basis (e1, e2): grad B_c = n x (p_{c+2} - p_{c+1}) / (2 area)
    Eigen::Vector2d grad[3];
    for (int c = 0; c < 3; ++c) {
      const Vec3 g = n_f.cross(p[(c + 2) % 3] - p[(c + 1) % 3]) / (2.0 * area);
      grad[c] = Eigen::Vector2d(g.dot(e1), g.dot(e2));
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const double w = area * grad[a].dot(d2 * grad[b]);
        triplets.emplace_back(idx[a], idx[b], w);
        triplets.emplace_back(idx[b], idx[a], w);
      }
    }
  }
  OperatorPair ops;
  ops.stiffness = from_offdiagonal(n, triplets);
  ops.mass = mesh.mass();
  ops.config = config;
  ops.mesh_hash = mesh.hash();
  return ops;
}

}  // namespace meshwave
