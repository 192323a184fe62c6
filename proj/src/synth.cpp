#include "meshwave/synth.hpp"

#include "meshwave/container.hpp"
#include "meshwave/curvature.hpp"
#include "meshwave/error.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace meshwave {

namespace {

using Json = nlohmann::json;

TriMesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Points v(12, 3);
  v << -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, 0, 0, -1, t, 0, 1, t, 0, -1, -t, 0, 1, -t, t, 0, -1, t, 0, 1, -t, 0, -1,
      -t, 0, 1;
  v.rowwise().normalize();
  Faces f(20, 3);
  f << 0, 11, 5, 0, 5, 1, 0, 1, 7, 0, 7, 10, 0, 10, 11, 1, 5, 9, 5, 11, 4, 11, 10, 2, 10, 7, 6, 7, 1, 8, 3, 9, 4, 3, 4,
      2, 3, 2, 6, 3, 6, 8, 3, 8, 9, 4, 9, 5, 2, 4, 11, 6, 2, 10, 8, 6, 7, 9, 8, 1;
  return TriMesh(std::move(v), std::move(f));
}

TriMesh icosphere(int level) {
  TriMesh mesh = icosahedron();
  for (int s = 0; s < level; ++s) {
    const Remeshed fine = remesh(mesh);
    Points v = fine.mesh.vertices();
    v.rowwise().normalize();
    mesh = TriMesh(std::move(v), fine.mesh.faces());
  }
  return mesh;
}

// Surface lattice of the box [-4,4] x [-0.5,0.5]^2 with n = (8r, r, r) cells.
TriMesh bar(int r) {
  const int n[3] = {8 * r, r, r};
  const double lo[3] = {-4.0, -0.5, -0.5};
  const double step = 1.0 / r;
  auto on_surface = [&](int i, int j, int k) {
    return i == 0 || i == n[0] || j == 0 || j == n[1] || k == 0 || k == n[2];
  };
  std::vector<int> index(static_cast<std::size_t>((n[0] + 1) * (n[1] + 1) * (n[2] + 1)), -1);
  auto slot = [&](int i, int j, int k) -> int& {
    return index[static_cast<std::size_t>((i * (n[1] + 1) + j) * (n[2] + 1) + k)];
  };
  std::vector<Vec3> points;
  for (int i = 0; i <= n[0]; ++i) {
    for (int j = 0; j <= n[1]; ++j) {
      for (int k = 0; k <= n[2]; ++k) {
        if (!on_surface(i, j, k)) continue;
        slot(i, j, k) = static_cast<int>(points.size());
        points.emplace_back(lo[0] + i * step, lo[1] + j * step, lo[2] + k * step);
      }
    }
  }
  std::vector<Eigen::Vector3i> tris;
  // Each box side: fixed axis `w` at lattice value `level`, in-plane axes (a, b)
  // with a x b along the outward normal.
  auto side = [&](int w, int level, int a, int b) {
    for (int u = 0; u < n[a]; ++u) {
      for (int v = 0; v < n[b]; ++v) {
        auto at = [&](int du, int dv) {
          int c[3];
          c[w] = level;
          c[a] = u + du;
          c[b] = v + dv;
          return slot(c[0], c[1], c[2]);
        };
        tris.emplace_back(at(0, 0), at(1, 0), at(1, 1));
        tris.emplace_back(at(0, 0), at(1, 1), at(0, 1));
      }
    }
  };
  side(0, 0, 2, 1);
  side(0, n[0], 1, 2);
  side(1, 0, 0, 2);
  side(1, n[1], 2, 0);
  side(2, 0, 1, 0);
  side(2, n[2], 0, 1);
  Points v(static_cast<Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) v.row(static_cast<Index>(i)) = points[i].transpose();
  Faces f(static_cast<Index>(tris.size()), 3);
  for (std::size_t i = 0; i < tris.size(); ++i) f.row(static_cast<Index>(i)) = tris[i].transpose();
  return TriMesh(std::move(v), std::move(f));
}

// Radius 0.5, x in [-2, 2]; optional fan caps around two centre vertices.
TriMesh cylinder(int r, bool caps) {
  const int segments = 4 * r;
  const int rings = 4 * r + 1;
  std::vector<Vec3> points;
  for (int i = 0; i < rings; ++i) {
    const double x = -2.0 + 4.0 * i / (rings - 1);
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      points.emplace_back(x, 0.5 * std::cos(phi), 0.5 * std::sin(phi));
    }
  }
  auto id = [&](int i, int s) { return i * segments + (s % segments); };
  std::vector<Eigen::Vector3i> tris;
  for (int i = 0; i + 1 < rings; ++i) {
    for (int s = 0; s < segments; ++s) {
      tris.emplace_back(id(i, s), id(i, s + 1), id(i + 1, s + 1));
      tris.emplace_back(id(i, s), id(i + 1, s + 1), id(i + 1, s));
    }
  }
  if (caps) {
    const int low = static_cast<int>(points.size());
    points.emplace_back(-2.0, 0.0, 0.0);
    const int high = low + 1;
    points.emplace_back(2.0, 0.0, 0.0);
    for (int s = 0; s < segments; ++s) {
      tris.emplace_back(low, id(0, s + 1), id(0, s));
      tris.emplace_back(high, id(rings - 1, s), id(rings - 1, s + 1));
    }
  }
  Points v(static_cast<Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) v.row(static_cast<Index>(i)) = points[i].transpose();
  Faces f(static_cast<Index>(tris.size()), 3);
  for (std::size_t i = 0; i < tris.size(); ++i) f.row(static_cast<Index>(i)) = tris[i].transpose();
  return TriMesh(std::move(v), std::move(f));
}

std::string format_magnitude(double m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.4f", m);
  return buf;
}

}  // namespace

BaseKind parse_base_kind(const std::string& name) {
  if (name == "icosphere") return BaseKind::Icosphere;
  if (name == "bar") return BaseKind::Bar;
  if (name == "cylinder") return BaseKind::Cylinder;
  throw Error(ErrorCode::ConfigInvalid, "unknown base kind '" + name + "'");
}

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::Icosphere: return "icosphere";
    case BaseKind::Bar: return "bar";
    case BaseKind::Cylinder: return "cylinder";
  }
  return "?";
}

DeformMode parse_deform_mode(const std::string& name) {
  if (name == "bend") return DeformMode::Bend;
  if (name == "twist") return DeformMode::Twist;
  throw Error(ErrorCode::ConfigInvalid, "unknown deformation mode '" + name + "'");
}

std::string to_string(DeformMode mode) { return mode == DeformMode::Bend ? "bend" : "twist"; }

TriMesh gen_base(const BaseSpec& spec) {
  Index expected = 0;
  switch (spec.kind) {
    case BaseKind::Icosphere:
      if (spec.resolution < 0 || spec.resolution > 8) break;
      return icosphere(spec.resolution);
    case BaseKind::Bar:
      if (spec.resolution < 1 || spec.resolution > 64) break;
      return bar(spec.resolution);
    case BaseKind::Cylinder:
      expected = static_cast<Index>(4 * spec.resolution) * (4 * spec.resolution + 1);
      if (spec.resolution < 1 || spec.resolution > 64 || expected < 12) break;
      return cylinder(spec.resolution, spec.caps);
  }
  throw Error(ErrorCode::ResolutionTooSmall,
              to_string(spec.kind) + " resolution " + std::to_string(spec.resolution) + " is out of range");
}

DeformFrame DeformFrame::of(const TriMesh& mesh) {
  const Points& v = mesh.vertices();
  const Eigen::RowVector3d centroid = v.colwise().mean();
  const Eigen::MatrixXd centered = v.rowwise() - centroid;
  const Eigen::Matrix3d cov = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  DeformFrame f;
  f.e1 = canonical_sign(eig.eigenvectors().col(2));
  Vec3 up = Vec3::UnitY() - Vec3::UnitY().dot(f.e1) * f.e1;
  if (up.norm() < 1e-6) up = Vec3::UnitZ() - Vec3::UnitZ().dot(f.e1) * f.e1;
  f.e2 = up.normalized();
  f.e3 = f.e1.cross(f.e2);
  const Eigen::VectorXd s = centered * f.e1;
  f.length = s.maxCoeff() - s.minCoeff();
  f.origin = centroid.transpose() + 0.5 * (s.maxCoeff() + s.minCoeff()) * f.e1;
  return f;
}

TriMesh deform(const TriMesh& mesh, DeformMode mode, double magnitude, const DeformFrame& frame) {
  const double limit = mode == DeformMode::Bend ? std::numbers::pi / 2 : std::numbers::pi;
  if (!std::isfinite(magnitude) || std::abs(magnitude) > limit) {
    throw Error(ErrorCode::MagnitudeOutOfRange,
                to_string(mode) + " magnitude " + std::to_string(magnitude) + " outside [-" + std::to_string(limit) +
                    ", " + std::to_string(limit) + "]");
  }
  Points out = mesh.vertices();
  if (magnitude == 0.0) return mesh.with_vertices(std::move(out));
  for (Index i = 0; i < out.rows(); ++i) {
    const Vec3 p = out.row(i).transpose() - frame.origin;
    const double s = p.dot(frame.e1);
    const double y = p.dot(frame.e2);
    const double z = p.dot(frame.e3);
    double s2 = s;
    double y2 = y;
    double z2 = z;
    if (mode == DeformMode::Bend) {
      const double radius = frame.length / magnitude;
      const double a = s / radius;
      s2 = (radius - y) * std::sin(a);
      y2 = radius - (radius - y) * std::cos(a);
    } else {
      const double a = magnitude * s;
      y2 = std::cos(a) * y - std::sin(a) * z;
      z2 = std::sin(a) * y + std::cos(a) * z;
    }
    out.row(i) = (frame.origin + s2 * frame.e1 + y2 * frame.e2 + z2 * frame.e3).transpose();
  }
  return mesh.with_vertices(std::move(out));
}

TriMesh deform(const TriMesh& mesh, DeformMode mode, double magnitude) {
  return deform(mesh, mode, magnitude, DeformFrame::of(mesh));
}

double isometry_distortion(const TriMesh& a, const TriMesh& b) {
  if (a.vertex_count() != b.vertex_count() || a.faces() != b.faces()) {
    throw Error(ErrorCode::ShapeMismatch, "isometry distortion needs shared connectivity");
  }
  double worst = 0.0;
  for (const Edge& e : a.edges()) {
    const double la = (a.vertex(e.a) - a.vertex(e.b)).norm();
    const double lb = (b.vertex(e.a) - b.vertex(e.b)).norm();
    worst = std::max(worst, std::abs(lb / la - 1.0));
  }
  return worst;
}

Remeshed remesh(const TriMesh& mesh) {
  const Index n = mesh.vertex_count();
  const auto& edges = mesh.edges();
  Points v(n + static_cast<Index>(edges.size()), 3);
  v.topRows(n) = mesh.vertices();
  std::vector<int> to_original(static_cast<std::size_t>(v.rows()));
  std::iota(to_original.begin(), to_original.begin() + n, 0);
  std::map<std::pair<int, int>, int> midpoint;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Index id = n + static_cast<Index>(e);
    v.row(id) = 0.5 * (mesh.vertices().row(edges[e].a) + mesh.vertices().row(edges[e].b));
    // Both endpoints are equally near; the tie goes to the smaller index.
    to_original[static_cast<std::size_t>(id)] = edges[e].a;
    midpoint[{edges[e].a, edges[e].b}] = static_cast<int>(id);
  }
  auto mid = [&](int a, int b) { return midpoint.at({std::min(a, b), std::max(a, b)}); };
  Faces f(4 * mesh.face_count(), 3);
  for (Index t = 0; t < mesh.face_count(); ++t) {
    const int a = mesh.faces()(t, 0);
    const int b = mesh.faces()(t, 1);
    const int c = mesh.faces()(t, 2);
    const int ab = mid(a, b);
    const int bc = mid(b, c);
    const int ca = mid(c, a);
    f.row(4 * t) << a, ab, ca;
    f.row(4 * t + 1) << ab, b, bc;
    f.row(4 * t + 2) << ca, bc, c;
    f.row(4 * t + 3) << ab, bc, ca;
  }
  return {TriMesh(std::move(v), std::move(f)), std::move(to_original)};
}

const LabeledMesh& Dataset::mesh(const std::string& name) const {
  if (templ.name == name) return templ;
  for (const auto* group : {&training, &held_out}) {
    for (const LabeledMesh& m : *group) {
      if (m.name == name) return m;
    }
  }
  throw Error(ErrorCode::ManifestInvalid, "no mesh named '" + name + "'");
}

Dataset make_dataset(const DatasetConfig& config) {
  const auto count = static_cast<int>(config.deformations.size());
  if (count < 2) throw Error(ErrorCode::ConfigInvalid, "need at least two deformations");
  if (config.test_count < 1 || config.test_count >= count) {
    throw Error(ErrorCode::ConfigInvalid, "test_count must be in [1, " + std::to_string(count - 1) + "]");
  }
  const TriMesh base = gen_base(config.base);
  const DeformFrame frame = DeformFrame::of(base);
  std::vector<int> identity(static_cast<std::size_t>(base.vertex_count()));
  std::iota(identity.begin(), identity.end(), 0);

  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.split_seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<int> held(order.begin(), order.begin() + config.test_count);
  std::sort(held.begin(), held.end());

  Dataset ds;
  ds.templ = {"template", base, identity};
  for (int d = 0; d < count; ++d) {
    const Deformation& def = config.deformations[static_cast<std::size_t>(d)];
    char name[64];
    std::snprintf(name, sizeof name, "d%02d_%s%s", d, to_string(def.mode).c_str(),
                  format_magnitude(def.magnitude).c_str());
    LabeledMesh lm{name, deform(base, def.mode, def.magnitude, frame), identity};
    if (!std::binary_search(held.begin(), held.end(), d)) {
      ds.training.push_back(std::move(lm));
      continue;
    }
    ds.pairs.push_back({ds.templ.name, lm.name, identity, isometry_distortion(base, lm.mesh)});
    if (config.include_remeshed) {
      Remeshed r = remesh(lm.mesh);
      LabeledMesh fine{lm.name + "_remeshed", std::move(r.mesh), std::move(r.to_original)};
      ds.pairs.push_back({ds.templ.name, fine.name, identity, -1.0});
      ds.held_out.push_back(std::move(lm));
      ds.held_out.push_back(std::move(fine));
    } else {
      ds.held_out.push_back(std::move(lm));
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------

std::vector<int> read_index_file(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<int> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const long v = std::stol(line, &used);
      if (line.find_first_not_of(" \t\r", used) != std::string::npos || v < 0 || v > 0x7fffffff) throw 0;
      out.push_back(static_cast<int>(v));
    } catch (...) {
      throw Error(ErrorCode::ManifestInvalid, path.string() + ":" + std::to_string(line_no) + ": not an index");
    }
  }
  return out;
}

void write_index_file(const std::vector<int>& values, const std::filesystem::path& path) {
  std::string text;
  for (int v : values) text += std::to_string(v) + "\n";
  write_file_atomic(path, text);
}

const ManifestMesh& Manifest::mesh(const std::string& name) const {
  for (const ManifestMesh& m : meshes) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::ManifestInvalid, "manifest has no mesh named '" + name + "'");
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  Json j;
  j["template"] = manifest.templ;
  j["meshes"] = Json::array();
  for (const ManifestMesh& m : manifest.meshes) {
    Json e{{"name", m.name}, {"mesh", m.mesh}};
    if (!m.labels.empty()) e["labels"] = m.labels;
    j["meshes"].push_back(e);
  }
  j["training"] = manifest.training;
  j["pairs"] = Json::array();
  for (const ManifestPair& p : manifest.pairs) {
    j["pairs"].push_back({{"source", p.source}, {"target", p.target}, {"ground_truth", p.ground_truth}});
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
  Manifest m;
  m.root = path.parent_path();
  try {
    const Json j = Json::parse(read_file(path));
    m.templ = j.at("template").get<std::string>();
    for (const Json& e : j.at("meshes")) {
      m.meshes.push_back({e.at("name").get<std::string>(), e.at("mesh").get<std::string>(),
                          e.value("labels", std::string())});
    }
    m.training = j.value("training", std::vector<std::string>());
    for (const Json& p : j.value("pairs", Json::array())) {
      m.pairs.push_back({p.at("source").get<std::string>(), p.at("target").get<std::string>(),
                         p.at("ground_truth").get<std::string>()});
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ManifestInvalid, path.string() + ": " + e.what());
  }
  m.mesh(m.templ);
  for (const std::string& name : m.training) {
    if (m.mesh(name).labels.empty()) throw Error(ErrorCode::ManifestInvalid, "training mesh '" + name + "' has no labels");
  }
  for (const ManifestPair& p : m.pairs) {
    m.mesh(p.source);
    m.mesh(p.target);
  }
  return m;
}

Manifest write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string());
  Manifest m;
  m.root = dir;
  m.templ = dataset.templ.name;
  auto emit = [&](const LabeledMesh& lm) {
    const ManifestMesh entry{lm.name, lm.name + ".off", lm.name + ".labels"};
    write_file_atomic(dir / entry.mesh, to_off(lm.mesh));
    write_index_file(lm.labels, dir / entry.labels);
    m.meshes.push_back(entry);
  };
  emit(dataset.templ);
  for (const LabeledMesh& lm : dataset.training) {
    emit(lm);
    m.training.push_back(lm.name);
  }
  for (const LabeledMesh& lm : dataset.held_out) emit(lm);
  for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
    const ShapePair& p = dataset.pairs[i];
    const ManifestPair entry{p.source, p.target, "pair_" + std::to_string(i) + ".gt"};
    write_index_file(p.ground_truth, dir / entry.ground_truth);
    m.pairs.push_back(entry);
  }
  write_manifest(m, dir / "manifest.json");
  return m;
}

}  // namespace meshwave
