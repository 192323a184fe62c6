#include "meshwave/curvature.hpp"

#include "meshwave/error.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace meshwave {

namespace {

// Rotates the orthonormal pair (u, v) about u x v so that their normal becomes
// `new_normal`.
void rotate_frame(Vec3& u, Vec3& v, const Vec3& new_normal) {
  const Vec3 old_normal = u.cross(v);
  const double ndot = old_normal.dot(new_normal);
  if (ndot <= -1.0) {
    u = -u;
    v = -v;
    return;
  }
  const Vec3 perp_old = new_normal - ndot * old_normal;
  const Vec3 dperp = (old_normal + new_normal) / (1.0 + ndot);
  u -= dperp * perp_old.dot(u);
  v -= dperp * perp_old.dot(v);
}

void tangent_basis(const Vec3& n, Vec3& u, Vec3& v) {
  u = fallback_direction(n);
  v = n.cross(u);
}

}  // namespace

Vec3 fallback_direction(const Vec3& n) {
  Vec3 d = Vec3::UnitX() - n.dot(Vec3::UnitX()) * n;
  if (d.norm() < 1e-8) d = Vec3::UnitY() - n.dot(Vec3::UnitY()) * n;
  return d.normalized();
}

Vec3 canonical_sign(const Vec3& d) {
  for (int c = 0; c < 3; ++c) {
    if (std::abs(d[c]) > 1e-12) return d[c] > 0.0 ? d : Vec3(-d);
  }
  return d;
}

PrincipalFrames estimate_frames(const TriMesh& mesh, const FrameOptions& options) {
  const Index n = mesh.vertex_count();
  const Points& normals = mesh.vertex_normals();

  std::vector<int> valence(static_cast<std::size_t>(n), 0);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    for (int c = 0; c < 3; ++c) ++valence[static_cast<std::size_t>(mesh.faces()(f, c))];
  }
  for (Index i = 0; i < n; ++i) {
    if (valence[static_cast<std::size_t>(i)] == 0) {
      throw Error(ErrorCode::IsolatedVertex, "vertex " + std::to_string(i) + " has no incident face");
    }
  }

  std::vector<Vec3> basis_u(static_cast<std::size_t>(n)), basis_v(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    tangent_basis(normals.row(i).transpose(), basis_u[static_cast<std::size_t>(i)],
                  basis_v[static_cast<std::size_t>(i)]);
  }

  struct FaceFit {
    Vec3 fu, fv;
    Eigen::Vector3d lmn;
  };
  std::vector<FaceFit> fits(static_cast<std::size_t>(mesh.face_count()));
  std::vector<std::vector<int>> vertex_faces(static_cast<std::size_t>(n));
  Points centroids(mesh.face_count(), 3);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const int idx[3] = {mesh.faces()(f, 0), mesh.faces()(f, 1), mesh.faces()(f, 2)};
    const Vec3 p[3] = {mesh.vertex(idx[0]), mesh.vertex(idx[1]), mesh.vertex(idx[2])};
    const Vec3 nv[3] = {normals.row(idx[0]).transpose(), normals.row(idx[1]).transpose(),
                        normals.row(idx[2]).transpose()};
    const Vec3 face_n = mesh.face_normals().row(f).transpose();
    FaceFit& fit = fits[static_cast<std::size_t>(f)];
    fit.fu = (p[1] - p[0]).normalized();
    fit.fv = face_n.cross(fit.fu);

    // II [e.u, e.v]^T = [dn.u, dn.v]^T for each edge; unknowns (L, M, N).
    Eigen::Matrix<double, 6, 3> lhs = Eigen::Matrix<double, 6, 3>::Zero();
    Eigen::Matrix<double, 6, 1> rhs;
    for (int e = 0; e < 3; ++e) {
      const int a = e;
      const int b = (e + 1) % 3;
      const Vec3 edge = p[b] - p[a];
      const Vec3 dn = nv[b] - nv[a];
      const double eu = edge.dot(fit.fu);
      const double ev = edge.dot(fit.fv);
      lhs.row(2 * e) << eu, ev, 0.0;
      lhs.row(2 * e + 1) << 0.0, eu, ev;
      rhs[2 * e] = dn.dot(fit.fu);
      rhs[2 * e + 1] = dn.dot(fit.fv);
    }
    fit.lmn = (lhs.transpose() * lhs).ldlt().solve(lhs.transpose() * rhs);
    centroids.row(f) = (p[0] + p[1] + p[2]).transpose() / 3.0;
    for (int c = 0; c < 3; ++c) vertex_faces[static_cast<std::size_t>(idx[c])].push_back(static_cast<int>(f));
  }

  // Accumulated tensor (ku, kuv, kv) per vertex and weight.
  Eigen::MatrixX3d tensor = Eigen::MatrixX3d::Zero(n, 3);
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(n);
  auto accumulate = [&](Index i, int f, double falloff) {
    const auto vi = static_cast<std::size_t>(i);
    const FaceFit& fit = fits[static_cast<std::size_t>(f)];
    Vec3 ru = fit.fu;
    Vec3 rv = fit.fv;
    rotate_frame(ru, rv, normals.row(i).transpose());
    const double u1 = basis_u[vi].dot(ru);
    const double v1 = basis_u[vi].dot(rv);
    const double u2 = basis_v[vi].dot(ru);
    const double v2 = basis_v[vi].dot(rv);
    const Eigen::Vector3d& lmn = fit.lmn;
    const double ku = lmn[0] * u1 * u1 + 2.0 * lmn[1] * u1 * v1 + lmn[2] * v1 * v1;
    const double kuv = lmn[0] * u1 * u2 + lmn[1] * (u1 * v2 + u2 * v1) + lmn[2] * v1 * v2;
    const double kv = lmn[0] * u2 * u2 + 2.0 * lmn[1] * u2 * v2 + lmn[2] * v2 * v2;
    const double w = falloff * mesh.face_areas()[f];
    tensor.row(i) += w * Eigen::RowVector3d(ku, kuv, kv);
    weight[i] += w;
  };

  std::vector<Index> stamp(static_cast<std::size_t>(mesh.face_count()), -1);
  std::vector<int> queue;
  for (Index i = 0; i < n; ++i) {
    const auto& ring = vertex_faces[static_cast<std::size_t>(i)];
    if (options.radius <= 0.0) {
      for (int f : ring) accumulate(i, f, 1.0);
      continue;
    }
    // Faces reachable through vertex-sharing neighbours with centroid inside
    // the ball, Gaussian-weighted (sigma = radius / 3); the 1-ring is always
    // included.
    const Eigen::RowVector3d centre = mesh.vertices().row(i);
    const double r2 = options.radius * options.radius;
    const double inv_two_sigma2 = 4.5 / r2;
    queue.assign(ring.begin(), ring.end());
    for (int f : ring) stamp[static_cast<std::size_t>(f)] = i;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int f = queue[head];
      accumulate(i, f, std::exp(-(centroids.row(f) - centre).squaredNorm() * inv_two_sigma2));
      for (int c = 0; c < 3; ++c) {
        for (int g : vertex_faces[static_cast<std::size_t>(mesh.faces()(f, c))]) {
          auto& st = stamp[static_cast<std::size_t>(g)];
          if (st == i) continue;
          st = i;
          if ((centroids.row(g) - centre).squaredNorm() <= r2) queue.push_back(g);
        }
      }
    }
  }

  PrincipalFrames frames;
  frames.k_min.resize(n);
  frames.k_max.resize(n);
  frames.dir_max.resize(n, 3);
  frames.normal = normals;
  frames.umbilic.assign(static_cast<std::size_t>(n), false);

  // Curvature gaps below this are round-off on planar patches.
  const double floor = 1e-6 / mesh.bbox_diagonal();
  for (Index i = 0; i < n; ++i) {
    const auto vi = static_cast<std::size_t>(i);
    const Eigen::RowVector3d t = tensor.row(i) / weight[i];
    Eigen::Matrix2d ii;
    ii << t[0], t[1], t[1], t[2];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
    eig.computeDirect(ii);
    const double lo = eig.eigenvalues()[0];
    const double hi = eig.eigenvalues()[1];
    frames.k_min[i] = lo;
    frames.k_max[i] = hi;

    const Vec3 n_i = normals.row(i).transpose();
    Vec3 dir;
    const bool umbilic = std::abs(hi - lo) < 1e-6 * (std::abs(hi) + std::abs(lo)) + floor;
    if (umbilic) {
      dir = fallback_direction(n_i);
    } else {
      const int which = std::abs(hi) >= std::abs(lo) ? 1 : 0;
      const Eigen::Vector2d e = eig.eigenvectors().col(which);
      dir = (e[0] * basis_u[vi] + e[1] * basis_v[vi]);
      dir -= dir.dot(n_i) * n_i;
      dir.normalize();
    }
    frames.umbilic[vi] = umbilic;
    frames.dir_max.row(i) = canonical_sign(dir).transpose();
  }
  return frames;
}

}  // namespace meshwave
