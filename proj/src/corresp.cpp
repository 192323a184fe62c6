#include "meshwave/corresp.hpp"

#include "meshwave/error.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

namespace meshwave {

std::vector<int> match_nn(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
  if (source.rows() == 0 || target.rows() == 0 || source.cols() == 0) {
    throw Error(ErrorCode::EmptyDescriptors, "descriptor matrices must be non-empty");
  }
  if (source.cols() != target.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor widths " + std::to_string(source.cols()) + " and " +
                                                  std::to_string(target.cols()));
  }
  // Columns are contiguous, so compare column vectors.
  const Eigen::MatrixXd s = source.transpose();
  const Eigen::MatrixXd t = target.transpose();
  std::vector<int> map(static_cast<std::size_t>(s.cols()));
  for (Index i = 0; i < s.cols(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index arg = 0;
    for (Index j = 0; j < t.cols(); ++j) {
      const double d = (t.col(j) - s.col(i)).squaredNorm();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    map[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return map;
}

std::vector<int> match_argmax(const Eigen::MatrixXd& scores) {
  if (scores.rows() == 0 || scores.cols() == 0) throw Error(ErrorCode::EmptyDescriptors, "empty score matrix");
  std::vector<int> map(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index arg = 0;
    scores.row(i).maxCoeff(&arg);
    map[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return map;
}

Eigen::VectorXd geodesic_from(const TriMesh& mesh, Index source) {
  const Index n = mesh.vertex_count();
  if (source < 0 || source >= n) throw Error(ErrorCode::IndexOutOfRange, "source vertex " + std::to_string(source));
  std::vector<std::vector<std::pair<int, double>>> adjacency(static_cast<std::size_t>(n));
  for (const Edge& e : mesh.edges()) {
    const double len = (mesh.vertex(e.a) - mesh.vertex(e.b)).norm();
    adjacency[static_cast<std::size_t>(e.a)].emplace_back(e.b, len);
    adjacency[static_cast<std::size_t>(e.b)].emplace_back(e.a, len);
  }
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, static_cast<int>(source));
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [u, len] : adjacency[static_cast<std::size_t>(v)]) {
      if (d + len < dist[u]) {
        dist[u] = d + len;
        queue.emplace(dist[u], u);
      }
    }
  }
  Index unreachable = 0;
  for (Index v = 0; v < n; ++v) unreachable += std::isinf(dist[v]) ? 1 : 0;
  if (unreachable > 0) {
    throw Error(ErrorCode::DisconnectedMesh, std::to_string(unreachable) + " vertices unreachable from vertex " +
                                                 std::to_string(source));
  }
  return dist;
}

const Eigen::VectorXd& GeodesicCache::from(Index source) {
  auto it = rows_.find(source);
  if (it == rows_.end()) it = rows_.emplace(source, geodesic_from(mesh_, source)).first;
  return it->second;
}

std::vector<double> default_radii() { return radii_range(0.0, 0.25, 0.0025); }

std::vector<double> radii_range(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw Error(ErrorCode::ConfigInvalid, "radii need start <= stop and step > 0");
  }
  const auto count = static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> radii;
  for (long i = 0; i < count; ++i) radii.push_back(start + static_cast<double>(i) * step);
  return radii;
}

std::vector<CgePoint> cumulative_curve(const Eigen::VectorXd& errors, std::span<const double> radii) {
  std::vector<CgePoint> curve;
  const double n = static_cast<double>(errors.size());
  for (double r : radii) {
    const auto within = (errors.array() <= r).count();
    curve.push_back({r, n > 0 ? static_cast<double>(within) / n : 1.0});
  }
  return curve;
}

CorrespondenceResult evaluate(std::span<const int> map, std::span<const int> ground_truth, GeodesicCache& geodesics,
                              const TriMesh& target, std::span<const double> radii) {
  if (map.size() != ground_truth.size()) {
    throw Error(ErrorCode::LengthMismatch, "map has " + std::to_string(map.size()) + " entries, ground truth " +
                                               std::to_string(ground_truth.size()));
  }
  const auto n = static_cast<int>(target.vertex_count());
  CorrespondenceResult out;
  out.map.assign(map.begin(), map.end());
  out.errors.resize(static_cast<Index>(map.size()));
  const double norm = std::sqrt(target.total_area());
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] < 0 || map[i] >= n || ground_truth[i] < 0 || ground_truth[i] >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "correspondence entry " + std::to_string(i));
    }
    const double d = map[i] == ground_truth[i] ? 0.0 : geodesics.from(ground_truth[i])[map[i]];
    out.errors[static_cast<Index>(i)] = d / norm;
  }
  out.average_error = out.errors.size() > 0 ? 100.0 * out.errors.mean() : 0.0;
  out.cge = cumulative_curve(out.errors, radii);
  return out;
}

CorrespondenceResult evaluate(std::span<const int> map, std::span<const int> ground_truth, const TriMesh& target,
                              std::span<const double> radii) {
  GeodesicCache cache(target);
  return evaluate(map, ground_truth, cache, target, radii);
}

}  // namespace meshwave
