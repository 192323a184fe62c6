#pragma once

#include "meshwave/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace meshwave {

enum class BaseKind { Icosphere, Bar, Cylinder };

struct BaseSpec {
  BaseKind kind = BaseKind::Icosphere;
  // icosphere: subdivision level; bar: cells across the 1x1 section (8r along
  // the length); cylinder: 4r segments around, 4r + 1 rings.
  int resolution = 2;
  bool caps = false;  // cylinder only
};

BaseKind parse_base_kind(const std::string& name);
std::string to_string(BaseKind kind);

// Unit icosphere (10 * 4^s + 2 vertices), 8 x 1 x 1 box centred at the
// origin, or radius-0.5 height-4 cylinder along x. Faces are oriented outward.
TriMesh gen_base(const BaseSpec& spec);

enum class DeformMode { Bend, Twist };

DeformMode parse_deform_mode(const std::string& name);
std::string to_string(DeformMode mode);

// Principal-axis frame of a shape: e1 = dominant PCA axis, e2 = +y made
// orthogonal to e1, e3 = e1 x e2; axial coordinates are centred on the
// midpoint of the extent along e1.
struct DeformFrame {
  Vec3 origin;
  Vec3 e1, e2, e3;
  double length = 0.0;  // extent along e1

  static DeformFrame of(const TriMesh& mesh);
};

// bend: the axial line becomes a circular arc of total angle `magnitude`
// (radians, |.| <= pi/2) in the e1-e2 plane, cross-sections kept rigid.
// twist: cross-sections rotate about e1 by magnitude * s (radians per unit
// length, |.| <= pi). Connectivity is unchanged.
TriMesh deform(const TriMesh& mesh, DeformMode mode, double magnitude, const DeformFrame& frame);
TriMesh deform(const TriMesh& mesh, DeformMode mode, double magnitude);

// max over edges of |len_b / len_a - 1| for meshes with shared connectivity.
double isometry_distortion(const TriMesh& a, const TriMesh& b);

struct Remeshed {
  TriMesh mesh;
  std::vector<int> to_original;  // per new vertex: vertex of the input mesh
};

// Midpoint 1-to-4 subdivision. Input vertices keep their indices; the midpoint
// of edge e gets index V + e (edges in TriMesh::edges order).
Remeshed remesh(const TriMesh& mesh);

struct Deformation {
  DeformMode mode = DeformMode::Bend;
  double magnitude = 0.0;
  bool operator==(const Deformation&) const = default;
};

struct DatasetConfig {
  BaseSpec base;
  std::vector<Deformation> deformations;
  int test_count = 1;
  std::uint64_t split_seed = 0;
  bool include_remeshed = true;
};

struct LabeledMesh {
  std::string name;
  TriMesh mesh;
  std::vector<int> labels;  // template vertex per vertex
};

struct ShapePair {
  std::string source;
  std::string target;
  std::vector<int> ground_truth;  // per source vertex: target vertex
  double isometry_distortion = -1.0;  // negative when connectivity differs
};

struct Dataset {
  LabeledMesh templ;
  std::vector<LabeledMesh> training;
  std::vector<LabeledMesh> held_out;  // pair targets
  std::vector<ShapePair> pairs;

  const LabeledMesh& mesh(const std::string& name) const;
};

// The undeformed base is the template; deformed variants are split by
// `split_seed` into training meshes and `test_count` held-out targets. Each
// held-out target yields a pair from the template, plus one to its remeshed
// version when `include_remeshed`.
Dataset make_dataset(const DatasetConfig& config);

// On-disk description: mesh files, labels files (one index per line) and
// pairs with ground-truth files, all relative to the manifest directory.
struct ManifestMesh {
  std::string name;
  std::string mesh;
  std::string labels;  // may be empty
  bool operator==(const ManifestMesh&) const = default;
};

struct ManifestPair {
  std::string source;
  std::string target;
  std::string ground_truth;
  bool operator==(const ManifestPair&) const = default;
};

struct Manifest {
  std::string templ;
  std::vector<ManifestMesh> meshes;
  std::vector<std::string> training;
  std::vector<ManifestPair> pairs;
  std::filesystem::path root;  // directory the relative paths resolve against

  bool operator==(const Manifest& other) const {
    return templ == other.templ && meshes == other.meshes && training == other.training && pairs == other.pairs;
  }
  const ManifestMesh& mesh(const std::string& name) const;
  std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
};

Manifest write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

std::vector<int> read_index_file(const std::filesystem::path& path);
void write_index_file(const std::vector<int>& values, const std::filesystem::path& path);

}  // namespace meshwave
