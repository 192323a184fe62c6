#pragma once

#include "meshwave/mesh.hpp"

#include <Eigen/Core>

#include <map>
#include <span>
#include <vector>

namespace meshwave {

// Row-wise nearest neighbour in squared L2 distance; ties go to the smallest
// target index.
std::vector<int> match_nn(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

// Row-wise argmax (smallest index on ties), for matching by classifier output.
std::vector<int> match_argmax(const Eigen::MatrixXd& scores);

// Dijkstra over the edge graph with Euclidean edge lengths.
Eigen::VectorXd geodesic_from(const TriMesh& mesh, Index source);

// Memoized single-source distances on one mesh.
class GeodesicCache {
 public:
  explicit GeodesicCache(const TriMesh& mesh) : mesh_(mesh) {}
  const Eigen::VectorXd& from(Index source);

 private:
  const TriMesh& mesh_;
  std::map<Index, Eigen::VectorXd> rows_;
};

struct CgePoint {
  double radius = 0.0;
  double fraction = 0.0;
};

struct CorrespondenceResult {
  std::vector<int> map;
  Eigen::VectorXd errors;  // geodesic error / sqrt(target area), per source vertex
  double average_error = 0.0;  // mean error x 100
  std::vector<CgePoint> cge;
};

// 0 to 0.25 in steps of 0.0025 (101 radii).
std::vector<double> default_radii();

// Radii start, start + step, ... up to stop (inclusive within half a step).
std::vector<double> radii_range(double start, double stop, double step);

// Fraction of errors <= r for each radius.
std::vector<CgePoint> cumulative_curve(const Eigen::VectorXd& errors, std::span<const double> radii);

CorrespondenceResult evaluate(std::span<const int> map, std::span<const int> ground_truth, const TriMesh& target,
                              std::span<const double> radii);
CorrespondenceResult evaluate(std::span<const int> map, std::span<const int> ground_truth, GeodesicCache& geodesics,
                              const TriMesh& target, std::span<const double> radii);

}  // namespace meshwave
