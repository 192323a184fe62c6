#include "meshwave/mesh.hpp"

#include "meshwave/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace meshwave {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double cot_at(const Vec3& corner, const Vec3& p, const Vec3& q) {
  const Vec3 u = p - corner;
  const Vec3 v = q - corner;
  return u.dot(v) / u.cross(v).norm();
}

}  // namespace

double bbox_diagonal(const Points& vertices) {
  if (vertices.rows() == 0) return 0.0;
  const Eigen::RowVector3d lo = vertices.colwise().minCoeff();
  const Eigen::RowVector3d hi = vertices.colwise().maxCoeff();
  return (hi - lo).norm();
}

Eigen::VectorXd face_areas(const Points& vertices, const Faces& faces) {
  const double diag = bbox_diagonal(vertices);
  const double threshold = 1e-12 * diag * diag;
  Eigen::VectorXd areas(faces.rows());
  for (Index f = 0; f < faces.rows(); ++f) {
    const Vec3 p0 = vertices.row(faces(f, 0)).transpose();
    const Vec3 p1 = vertices.row(faces(f, 1)).transpose();
    const Vec3 p2 = vertices.row(faces(f, 2)).transpose();
    areas[f] = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    if (!(areas[f] > threshold)) {
      throw Error(ErrorCode::DegenerateTriangle,
                  "face " + std::to_string(f) + " has area " + std::to_string(areas[f]));
    }
  }
  return areas;
}

Eigen::VectorXd vertex_mass(const Points& vertices, const Faces& faces) {
  const Eigen::VectorXd areas = face_areas(vertices, faces);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(vertices.rows());
  for (Index f = 0; f < faces.rows(); ++f) {
    const int idx[3] = {faces(f, 0), faces(f, 1), faces(f, 2)};
    const Vec3 p[3] = {vertices.row(idx[0]).transpose(), vertices.row(idx[1]).transpose(),
                       vertices.row(idx[2]).transpose()};
    int obtuse = -1;
    for (int c = 0; c < 3; ++c) {
      if ((p[(c + 1) % 3] - p[c]).dot(p[(c + 2) % 3] - p[c]) < 0.0) obtuse = c;
    }
    if (obtuse >= 0) {
      for (int c = 0; c < 3; ++c) {
        mass[idx[c]] += (c == obtuse ? 0.5 : 0.25) * areas[f];
      }
      continue;
    }
    // Voronoi region of corner c: (|e_cj|^2 cot(angle k) + |e_ck|^2 cot(angle j)) / 8
    for (int c = 0; c < 3; ++c) {
      const int j = (c + 1) % 3;
      const int k = (c + 2) % 3;
      const double cot_j = cot_at(p[j], p[k], p[c]);
      const double cot_k = cot_at(p[k], p[c], p[j]);
      mass[idx[c]] += ((p[j] - p[c]).squaredNorm() * cot_k + (p[k] - p[c]).squaredNorm() * cot_j) / 8.0;
    }
  }
  return mass;
}

Eigen::VectorXd vertex_mass(const TriMesh& mesh) { return vertex_mass(mesh.vertices(), mesh.faces()); }

TriMesh::TriMesh(Points vertices, Faces faces) : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const Index n = vertices_.rows();
  if (!vertices_.allFinite()) throw Error(ErrorCode::ParseError, "non-finite vertex coordinate");
  for (Index f = 0; f < faces_.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      if (faces_(f, c) < 0 || faces_(f, c) >= n) {
        throw Error(ErrorCode::IndexOutOfRange, "face " + std::to_string(f) + " references vertex " +
                                                    std::to_string(faces_(f, c)) + " of " + std::to_string(n));
      }
    }
    if (faces_(f, 0) == faces_(f, 1) || faces_(f, 1) == faces_(f, 2) || faces_(f, 0) == faces_(f, 2)) {
      throw Error(ErrorCode::DegenerateTriangle, "face " + std::to_string(f) + " repeats a vertex");
    }
  }

  // Each directed half-edge may appear once; each undirected edge at most twice.
  std::unordered_map<std::uint64_t, int> directed;
  std::map<std::pair<int, int>, int> undirected;
  directed.reserve(static_cast<std::size_t>(faces_.rows()) * 3);
  for (Index f = 0; f < faces_.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = faces_(f, c);
      const int b = faces_(f, (c + 1) % 3);
      const int count = ++undirected[{std::min(a, b), std::max(a, b)}];
      if (count > 2) {
        throw Error(ErrorCode::NonManifold,
                    "edge (" + std::to_string(a) + ", " + std::to_string(b) + ") has more than two faces");
      }
      if (++directed[edge_key(a, b)] > 1) {
        throw Error(ErrorCode::InconsistentOrientation,
                    "half-edge (" + std::to_string(a) + " -> " + std::to_string(b) + ") appears twice");
      }
    }
  }
  edges_.reserve(undirected.size());
  for (const auto& [key, count] : undirected) edges_.push_back({key.first, key.second, count});

  bbox_diagonal_ = meshwave::bbox_diagonal(vertices_);
  face_areas_ = meshwave::face_areas(vertices_, faces_);
  total_area_ = face_areas_.sum();

  face_normals_.resize(faces_.rows(), 3);
  vertex_normals_ = Points::Zero(n, 3);
  for (Index f = 0; f < faces_.rows(); ++f) {
    const Vec3 p0 = vertex(faces_(f, 0));
    const Vec3 cross = (vertex(faces_(f, 1)) - p0).cross(vertex(faces_(f, 2)) - p0);
    face_normals_.row(f) = cross.normalized().transpose();
    // |cross| = 2 * area, so this is the area-weighted sum
    for (int c = 0; c < 3; ++c) vertex_normals_.row(faces_(f, c)) += cross.transpose();
  }
  for (Index i = 0; i < n; ++i) {
    const double len = vertex_normals_.row(i).norm();
    if (len > 0.0) vertex_normals_.row(i) /= len;
  }

  mass_ = meshwave::vertex_mass(vertices_, faces_);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(vertices_.data(), static_cast<std::size_t>(vertices_.size()) * sizeof(double), h);
  h = fnv1a(faces_.data(), static_cast<std::size_t>(faces_.size()) * sizeof(int), h);
  hash_ = h;
}

Index TriMesh::boundary_edge_count() const noexcept {
  return std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.face_count == 1; });
}

TriMesh TriMesh::with_vertices(Points vertices) const {
  if (vertices.rows() != vertices_.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "vertex count changed");
  }
  return TriMesh(std::move(vertices), faces_);
}

// ---------------------------------------------------------------------------
// I/O

namespace {

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  int line_no = 0;

  // Next non-empty, non-comment line with surrounding whitespace stripped.
  bool next(std::string_view& out) {
    while (pos < text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
      if (!line.empty()) {
        out = line;
        return true;
      }
    }
    return false;
  }
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

double parse_double(std::string_view token, int line_no) {
  // std::from_chars for double is available in libstdc++ 11
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    parse_fail(line_no, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

long parse_int(std::string_view token, int line_no) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    parse_fail(line_no, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TriMesh parse_off(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  if (!reader.next(line)) parse_fail(reader.line_no, "empty file");
  auto tokens = split_ws(line);
  if (tokens.empty() || tokens[0] != "OFF") parse_fail(reader.line_no, "missing OFF header");
  tokens.erase(tokens.begin());
  if (tokens.empty()) {
    if (!reader.next(line)) parse_fail(reader.line_no, "missing counts line");
    tokens = split_ws(line);
  }
  if (tokens.size() < 2) parse_fail(reader.line_no, "counts line needs vertex and face counts");
  const long nv = parse_int(tokens[0], reader.line_no);
  const long nf = parse_int(tokens[1], reader.line_no);
  if (nv < 0 || nf < 0) parse_fail(reader.line_no, "negative counts");

  Points vertices(nv, 3);
  for (long i = 0; i < nv; ++i) {
    if (!reader.next(line)) parse_fail(reader.line_no, "unexpected end of file in vertex list");
    tokens = split_ws(line);
    if (tokens.size() < 3) parse_fail(reader.line_no, "vertex line needs 3 coordinates");
    for (int c = 0; c < 3; ++c) vertices(i, c) = parse_double(tokens[c], reader.line_no);
  }
  Faces faces(nf, 3);
  for (long f = 0; f < nf; ++f) {
    if (!reader.next(line)) parse_fail(reader.line_no, "unexpected end of file in face list");
    tokens = split_ws(line);
    if (tokens.empty()) parse_fail(reader.line_no, "empty face line");
    const long arity = parse_int(tokens[0], reader.line_no);
    if (arity != 3) {
      throw Error(ErrorCode::NonTriangleFace,
                  "line " + std::to_string(reader.line_no) + ": face with " + std::to_string(arity) + " vertices");
    }
    if (tokens.size() < 4) parse_fail(reader.line_no, "face line needs 3 indices");
    for (int c = 0; c < 3; ++c) faces(f, c) = static_cast<int>(parse_int(tokens[c + 1], reader.line_no));
  }
  return TriMesh(std::move(vertices), std::move(faces));
}

TriMesh parse_obj(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  std::vector<double> coords;
  std::vector<int> indices;
  while (reader.next(line)) {
    const auto tokens = split_ws(line);
    if (tokens[0] == "v") {
      if (tokens.size() < 4) parse_fail(reader.line_no, "vertex line needs 3 coordinates");
      for (int c = 1; c <= 3; ++c) coords.push_back(parse_double(tokens[c], reader.line_no));
    } else if (tokens[0] == "f") {
      if (tokens.size() != 4) {
        throw Error(ErrorCode::NonTriangleFace, "line " + std::to_string(reader.line_no) + ": face with " +
                                                    std::to_string(tokens.size() - 1) + " vertices");
      }
      const long nv = static_cast<long>(coords.size() / 3);
      for (int c = 1; c <= 3; ++c) {
        const auto slash = tokens[c].find('/');
        long idx = parse_int(tokens[c].substr(0, slash), reader.line_no);
        if (idx < 0) idx = nv + idx + 1;  // relative index
        if (idx == 0) parse_fail(reader.line_no, "OBJ indices are 1-based");
        indices.push_back(static_cast<int>(idx - 1));
      }
    }
  }
  const Index nv = static_cast<Index>(coords.size() / 3);
  const Index nf = static_cast<Index>(indices.size() / 3);
  Points vertices = Eigen::Map<const Points>(coords.data(), nv, 3);
  Faces faces = Eigen::Map<const Faces>(indices.data(), nf, 3);
  return TriMesh(std::move(vertices), std::move(faces));
}

MeshFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return MeshFormat::Off;
  if (ext == ".obj") return MeshFormat::Obj;
  throw Error(ErrorCode::FormatError, "unknown mesh extension '" + ext + "'");
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  const std::string text = read_file(path);
  return format == MeshFormat::Off ? parse_off(text) : parse_obj(text);
}

TriMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, format_from_path(path)); }

std::string to_off(const TriMesh& mesh) {
  std::string out = "OFF\n" + std::to_string(mesh.vertex_count()) + " " + std::to_string(mesh.face_count()) + " " +
                    std::to_string(mesh.edge_count()) + "\n";
  for (Index i = 0; i < mesh.vertex_count(); ++i) {
    out += format_double(mesh.vertices()(i, 0)) + " " + format_double(mesh.vertices()(i, 1)) + " " +
           format_double(mesh.vertices()(i, 2)) + "\n";
  }
  for (Index f = 0; f < mesh.face_count(); ++f) {
    out += "3 " + std::to_string(mesh.faces()(f, 0)) + " " + std::to_string(mesh.faces()(f, 1)) + " " +
           std::to_string(mesh.faces()(f, 2)) + "\n";
  }
  return out;
}

std::string to_obj(const TriMesh& mesh) {
  std::string out;
  for (Index i = 0; i < mesh.vertex_count(); ++i) {
    out += "v " + format_double(mesh.vertices()(i, 0)) + " " + format_double(mesh.vertices()(i, 1)) + " " +
           format_double(mesh.vertices()(i, 2)) + "\n";
  }
  for (Index f = 0; f < mesh.face_count(); ++f) {
    out += "f " + std::to_string(mesh.faces()(f, 0) + 1) + " " + std::to_string(mesh.faces()(f, 1) + 1) + " " +
           std::to_string(mesh.faces()(f, 2) + 1) + "\n";
  }
  return out;
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  write_file(path, format_from_path(path) == MeshFormat::Off ? to_off(mesh) : to_obj(mesh));
}

}  // namespace meshwave
