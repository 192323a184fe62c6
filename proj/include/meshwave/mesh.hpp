#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace meshwave {

using Index = Eigen::Index;
using Vec3 = Eigen::Vector3d;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct Edge {
  int a;  // a < b
  int b;
  int face_count;
};

// Immutable manifold triangle mesh with derived geometry.
//
// Construction validates connectivity (manifold, consistently oriented,
// non-degenerate faces) and computes face areas, face and vertex normals and
// the lumped mixed-Voronoi mass. Boundary edges (one incident face) are
// accepted.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(Points vertices, Faces faces);

  const Points& vertices() const noexcept { return vertices_; }
  const Faces& faces() const noexcept { return faces_; }
  const Eigen::VectorXd& face_areas() const noexcept { return face_areas_; }
  const Points& face_normals() const noexcept { return face_normals_; }
  const Points& vertex_normals() const noexcept { return vertex_normals_; }
  const Eigen::VectorXd& mass() const noexcept { return mass_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  Index vertex_count() const noexcept { return vertices_.rows(); }
  Index face_count() const noexcept { return faces_.rows(); }
  Index edge_count() const noexcept { return static_cast<Index>(edges_.size()); }
  Index boundary_edge_count() const noexcept;
  double total_area() const noexcept { return total_area_; }
  double bbox_diagonal() const noexcept { return bbox_diagonal_; }
  bool is_closed() const noexcept { return boundary_edge_count() == 0; }

  Vec3 vertex(Index i) const { return vertices_.row(i).transpose(); }

  // Stable 64-bit content hash (FNV-1a over vertex and face bytes).
  std::uint64_t hash() const noexcept { return hash_; }

  // Same connectivity, new positions; re-validates geometry.
  TriMesh with_vertices(Points vertices) const;

 private:
  Points vertices_;
  Faces faces_;
  Eigen::VectorXd face_areas_;
  Points face_normals_;
  Points vertex_normals_;
  Eigen::VectorXd mass_;
  std::vector<Edge> edges_;
  double total_area_ = 0.0;
  double bbox_diagonal_ = 0.0;
  std::uint64_t hash_ = 0;
};

enum class MeshFormat { Off, Obj };

// Picks the format from the file extension (.off / .obj, case-insensitive).
MeshFormat format_from_path(const std::filesystem::path& path);

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriMesh load_mesh(const std::filesystem::path& path);
TriMesh parse_off(std::string_view text);
TriMesh parse_obj(std::string_view text);

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);
std::string to_off(const TriMesh& mesh);
std::string to_obj(const TriMesh& mesh);

// Meyer mixed-Voronoi lumped mass: cotangent Voronoi areas on non-obtuse
// triangles; on obtuse triangles area/2 at the obtuse corner and area/4 at
// the other two corners.
Eigen::VectorXd vertex_mass(const Points& vertices, const Faces& faces);
Eigen::VectorXd vertex_mass(const TriMesh& mesh);

// Per-face areas; throws DegenerateTriangle below the threshold
// 1e-12 * bbox_diagonal^2.
Eigen::VectorXd face_areas(const Points& vertices, const Faces& faces);

double bbox_diagonal(const Points& vertices);

}  // namespace meshwave
