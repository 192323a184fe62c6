#pragma once

#include "meshwave/error.hpp"
#include "meshwave/mesh.hpp"
#include "meshwave/synth.hpp"
#include "meshwave/wavelets.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include <unistd.h>

namespace meshwave::testing {

// (nx+1) x (ny+1) vertices on [0, w] x [0, h], z = 0, each cell split along
// the same diagonal.
inline TriMesh grid(int nx, int ny, double w = 1.0, double h = 1.0) {
  Points v((nx + 1) * (ny + 1), 3);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) v.row(j * (nx + 1) + i) << w * i / nx, h * j / ny, 0.0;
  }
  Faces f(2 * nx * ny, 3);
  int c = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = j * (nx + 1) + i, b = a + 1, d = a + nx + 1, e = d + 1;
      f.row(c++) << a, b, e;
      f.row(c++) << a, e, d;
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

inline TriMesh icosphere(int level) { return gen_base({BaseKind::Icosphere, level, false}); }

// Same connectivity, vertices displaced by uniform noise of the given amplitude.
inline TriMesh jitter(const TriMesh& mesh, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Points v = mesh.vertices();
  for (Index i = 0; i < v.rows(); ++i) {
    for (int c = 0; c < 3; ++c) v(i, c) += u(rng);
  }
  return mesh.with_vertices(std::move(v));
}

inline Eigen::Matrix3d rotation(double ax, double ay, double az) {
  return (Eigen::AngleAxisd(az, Vec3::UnitZ()) * Eigen::AngleAxisd(ay, Vec3::UnitY()) *
          Eigen::AngleAxisd(ax, Vec3::UnitX()))
      .toRotationMatrix();
}

inline TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& r, const Vec3& t, double scale = 1.0) {
  Points v(mesh.vertex_count(), 3);
  for (Index i = 0; i < v.rows(); ++i) v.row(i) = (scale * (r * mesh.vertex(i)) + t).transpose();
  return mesh.with_vertices(std::move(v));
}

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = n(rng);
  }
  return m;
}

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

// Central difference of f with respect to every entry of x; x is restored.
inline Eigen::MatrixXd numeric_gradient(Eigen::MatrixXd& x, const std::function<double()>& f, double h = 1e-5) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index r = 0; r < x.rows(); ++r) {
      const double keep = x(r, c);
      x(r, c) = keep + h;
      const double up = f();
      x(r, c) = keep - h;
      const double down = f();
      x(r, c) = keep;
      g(r, c) = (up - down) / (2 * h);
    }
  }
  return g;
}

// Largest entrywise relative deviation, with an absolute floor for entries
// that are both tiny.
inline double max_gradient_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric, double floor = 1e-7) {
  double worst = 0.0;
  for (Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i], n = numeric.data()[i];
    const double scale = std::max({std::abs(a), std::abs(n), floor});
    worst = std::max(worst, std::abs(a - n) / scale);
  }
  return worst;
}

inline FilterBank make_bank(const TriMesh& mesh, int directions, int scales, int k, double alpha = 50.0,
                            bool tighten = false) {
  const PrincipalFrames frames = estimate_frames(mesh);
  std::vector<Spectrum> spectra;
  for (int m = 0; m < directions; ++m) {
    spectra.push_back(solve_eigs(assemble_albo(mesh, frames, AnisoConfig::direction(alpha, m, directions)), k));
  }
  const KernelSpec kernel = KernelSpec::for_spectra(spectra, scales, tighten);
  return build_filterbank(std::move(spectra), kernel);
}

inline Eigen::MatrixXd coords_of(const TriMesh& mesh) { return Eigen::MatrixXd(mesh.vertices()); }

// Per-tensor relative error ||a - n|| / max(||a||, ||n||, floor) (Frobenius).
inline double tensor_gradient_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric,
                                    double floor = 1e-5) {
  return (analytic - numeric).norm() / std::max({analytic.norm(), numeric.norm(), floor});
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("meshwave_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace meshwave::testing

#define MW_CHECK_THROWS_CODE(expr, code_)                     \
  do {                                                        \
    bool thrown_ = false;                                     \
    try {                                                     \
      (void)(expr);                                           \
    } catch (const ::meshwave::Error& e_) {                   \
      thrown_ = true;                                         \
      CHECK_MESSAGE(e_.code() == (code_), e_.what());         \
    }                                                         \
    CHECK_MESSAGE(thrown_, "expected " #code_);               \
  } while (0)
