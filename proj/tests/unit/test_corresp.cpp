#include "support.hpp"

#include "meshwave/corresp.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace meshwave;
using namespace meshwave::testing;

namespace {

Eigen::VectorXd bellman_ford(const TriMesh& m, Index source) {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(m.vertex_count(), std::numeric_limits<double>::infinity());
  d[source] = 0.0;
  for (Index it = 0; it < m.vertex_count(); ++it) {
    bool changed = false;
    for (const Edge& e : m.edges()) {
      const double w = (m.vertex(e.a) - m.vertex(e.b)).norm();
      if (d[e.a] + w < d[e.b]) d[e.b] = d[e.a] + w, changed = true;
      if (d[e.b] + w < d[e.a]) d[e.a] = d[e.b] + w, changed = true;
    }
    if (!changed) break;
  }
  return d;
}

}  // namespace

TEST_CASE("nearest neighbour matching") {
  const Eigen::MatrixXd d = random_matrix(30, 6, 1);
  const std::vector<int> self = match_nn(d, d);
  for (int i = 0; i < 30; ++i) CHECK(self[static_cast<std::size_t>(i)] == i);

  Eigen::MatrixXd s(2, 1), t(2, 1);
  s << 0.0, 1.0;
  t << 0.9, 0.1;
  CHECK(match_nn(s, t) == std::vector<int>{1, 0});

  // relabeling equivariance
  std::vector<int> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  Eigen::MatrixXd permuted(30, 6);
  for (int i = 0; i < 30; ++i) permuted.row(i) = d.row(perm[static_cast<std::size_t>(i)]);
  const std::vector<int> m = match_nn(d, permuted);
  for (int i = 0; i < 30; ++i) CHECK(perm[static_cast<std::size_t>(m[static_cast<std::size_t>(i)])] == i);
}

TEST_CASE("ties go to the smallest index") {
  Eigen::MatrixXd s(1, 2), t(4, 2);
  s << 0, 0;
  t << 2, 0, 1, 0, 0, 1, -1, 0;
  CHECK(match_nn(s, t) == std::vector<int>{1});
  Eigen::MatrixXd scores(2, 3);
  scores << 1, 3, 3, 5, 0, 5;
  CHECK(match_argmax(scores) == std::vector<int>{1, 0});
}

TEST_CASE("matching errors") {
  MW_CHECK_THROWS_CODE(match_nn(Eigen::MatrixXd(0, 3), Eigen::MatrixXd::Ones(2, 3)), ErrorCode::EmptyDescriptors);
  MW_CHECK_THROWS_CODE(match_nn(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd(0, 3)), ErrorCode::EmptyDescriptors);
  MW_CHECK_THROWS_CODE(match_nn(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(2, 4)), ErrorCode::DimensionMismatch);
}

TEST_CASE("geodesic chain") {
  // 0-1 (length 1), 1-2 (length 2); 0 and 2 are not adjacent and the detour
  // through 3 is long.
  Points v(4, 3);
  v << 0, 0, 0, 1, 0, 0, 1, 2, 0, -5, 5, 0;
  Faces f(2, 3);
  f << 0, 1, 3, 1, 2, 3;
  const Eigen::VectorXd d = geodesic_from(TriMesh(v, f), 0);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 1.0);
  CHECK(d[2] == 3.0);
}

TEST_CASE("geodesics equal Bellman-Ford on a grid") {
  const TriMesh m = jitter(grid(9, 9), 0.02, 5);
  const Eigen::VectorXd d = geodesic_from(m, 0);
  CHECK(d == bellman_ford(m, 0));
  CHECK(d[99] == bellman_ford(m, 0)[99]);
  const Eigen::VectorXd e = geodesic_from(m, 57);
  CHECK(e == bellman_ford(m, 57));
}

TEST_CASE("geodesic triangle inequality") {
  const TriMesh m = jitter(icosphere(2), 0.02, 3);
  GeodesicCache cache(m);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<Index> pick(0, m.vertex_count() - 1);
  for (int i = 0; i < 40; ++i) {
    const Index a = pick(rng), b = pick(rng), c = pick(rng);
    CHECK(cache.from(a)[c] <= cache.from(a)[b] + cache.from(b)[c] + 1e-12);
    CHECK(cache.from(a)[b] == doctest::Approx(cache.from(b)[a]).epsilon(1e-12));
  }
  CHECK(cache.from(7) == geodesic_from(m, 7));
}

TEST_CASE("geodesic errors") {
  Points v(6, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 0, 0, 6, 0, 0, 5, 1, 0;
  Faces f(2, 3);
  f << 0, 1, 2, 3, 4, 5;
  const TriMesh m(v, f);
  MW_CHECK_THROWS_CODE(geodesic_from(m, 0), ErrorCode::DisconnectedMesh);
  MW_CHECK_THROWS_CODE(geodesic_from(icosphere(0), 12), ErrorCode::IndexOutOfRange);
}

TEST_CASE("radii") {
  const std::vector<double> r = default_radii();
  REQUIRE(r.size() == 101);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(radii_range(0, 1, 0.5) == std::vector<double>{0, 0.5, 1});
  MW_CHECK_THROWS_CODE(radii_range(0, 1, 0), ErrorCode::ConfigInvalid);
  MW_CHECK_THROWS_CODE(radii_range(1, 0, 0.1), ErrorCode::ConfigInvalid);
}

TEST_CASE("cumulative curve by hand") {
  Eigen::VectorXd e(3);
  e << 0, 0, 0.5;
  const std::vector<double> radii{0, 0.25, 1};
  const std::vector<CgePoint> c = cumulative_curve(e, radii);
  REQUIRE(c.size() == 3);
  CHECK(c[0].fraction == doctest::Approx(2.0 / 3));
  CHECK(c[1].fraction == doctest::Approx(2.0 / 3));
  CHECK(c[2].fraction == 1.0);
  CHECK(c[2].radius == 1.0);
}

TEST_CASE("exact matching is the zero fixed point") {
  const TriMesh m = icosphere(2);
  std::vector<int> id(static_cast<std::size_t>(m.vertex_count()));
  std::iota(id.begin(), id.end(), 0);
  const CorrespondenceResult r = evaluate(id, id, m, default_radii());
  CHECK(r.average_error == 0.0);
  CHECK(r.errors.isZero(0.0));
  for (const CgePoint& p : r.cge) CHECK(p.fraction == 1.0);
}

TEST_CASE("evaluation properties") {
  const TriMesh m = jitter(icosphere(2), 0.02, 8);
  const Index n = m.vertex_count();
  std::vector<int> gt(static_cast<std::size_t>(n)), map(static_cast<std::size_t>(n));
  std::iota(gt.begin(), gt.end(), 0);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, int(n) - 1);
  int exact = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    map[i] = (i % 3 == 0) ? pick(rng) : gt[i];
    exact += map[i] == gt[i];
  }
  const std::vector<double> radii = radii_range(0, 1, 0.01);
  const CorrespondenceResult r = evaluate(map, gt, m, radii);
  CHECK(r.map == map);
  CHECK(r.average_error > 0.0);
  CHECK(r.average_error == doctest::Approx(100.0 * r.errors.mean()));
  CHECK(r.cge.front().fraction == doctest::Approx(double(exact) / double(n)));
  for (std::size_t i = 1; i < r.cge.size(); ++i) CHECK(r.cge[i].fraction >= r.cge[i - 1].fraction);
  CHECK(r.cge.back().fraction == 1.0);
  const double area = std::sqrt(m.total_area());
  CHECK(r.errors[1 * 3] == doctest::Approx(geodesic_from(m, gt[3])[map[3]] / area));

  const TriMesh big = transformed(m, Eigen::Matrix3d::Identity(), Vec3::Zero(), 3.7);
  const CorrespondenceResult s = evaluate(map, gt, big, radii);
  CHECK((s.errors - r.errors).cwiseAbs().maxCoeff() < 1e-9);

  std::vector<int> bad = map;
  bad[0] = int(n);
  MW_CHECK_THROWS_CODE(evaluate(bad, gt, m, radii), ErrorCode::IndexOutOfRange);
  MW_CHECK_THROWS_CODE(evaluate(std::vector<int>(3, 0), gt, m, radii), ErrorCode::LengthMismatch);
}
