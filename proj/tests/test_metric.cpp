#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "nnrates/errors.hpp"
#include "nnrates/metric.hpp"

using namespace nnrates;

TEST_CASE("distance on the supported spaces") {
  const MetricSpace line = MetricSpace::interval(0.0, 1.0);
  CHECK(line.distance(0.2, 0.9) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(line.distance(0.4, 0.4) == 0.0);

  const MetricSpace two = fixtures::two_atom_space();
  CHECK(two.distance(AtomId{0}, AtomId{1}) == 1.0);
  CHECK(two.distance(AtomId{1}, AtomId{1}) == 0.0);

  const MetricSpace box = MetricSpace::box({0.0, 0.0}, {1.0, 1.0});
  CHECK(box.distance(std::vector<double>{0.0, 0.0}, std::vector<double>{0.3, 0.4}) ==
        doctest::Approx(0.5));
}

TEST_CASE("finite metric validation") {
  CHECK_THROWS_AS(MetricSpace::finite(DistanceMatrix(2, {0, 1, 2, 0})), ArgumentError);
  CHECK_THROWS_AS(MetricSpace::finite(DistanceMatrix(2, {0, 0, 0, 0})), ArgumentError);
  CHECK_THROWS_AS(MetricSpace::finite(DistanceMatrix(3, {0, 1, 5, 1, 0, 1, 5, 1, 0})), ArgumentError);
  CHECK_NOTHROW(MetricSpace::finite(DistanceMatrix(3, {0, 1, 2, 1, 0, 1, 2, 1, 0})));
}

TEST_CASE("distance matrix text format") {
  std::istringstream in("3\n0 1 2\n1 0 1\n2 1 0\n");
  const DistanceMatrix m = read_distance_matrix(in);
  CHECK(m.size() == 3);
  CHECK(m(0, 2) == 2.0);
  std::istringstream bad("2\n0 1\n1\n");
  CHECK_THROWS(read_distance_matrix(bad));
  CHECK_THROWS_AS(load_distance_matrix("/nonexistent/d.txt"), IoError);
}

TEST_CASE("neighbor order") {
  const MetricSpace line = MetricSpace::interval(0.0, 1.0);
  std::vector<AugmentedPoint> pts = {{0.5, 0.1, 0}, {0.2, 0.1, 1}, {0.9, 0.1, 2}};
  CHECK(neighbor_order(line, 0.0, pts) == std::vector<std::size_t>{1, 0, 2});

  // equal distance: smaller z first
  pts = {{0.5, 0.7, 0}, {0.5, 0.3, 1}};
  CHECK(neighbor_order(line, 0.0, pts) == std::vector<std::size_t>{1, 0});

  // equal distance and z: lower source index first, regardless of position
  pts = {{0.5, 0.3, 9}, {0.5, 0.3, 4}};
  CHECK(neighbor_order(line, 0.0, pts) == std::vector<std::size_t>{1, 0});
}

TEST_CASE("augmented ball membership") {
  const MetricSpace line = MetricSpace::interval(0.0, 2.0);
  const AugmentedBall ball{0.0, 1.0, 0.5};
  CHECK(augmented_ball_contains(ball, {0.5, 0.99, 0}, line));
  CHECK(augmented_ball_contains(ball, {1.0, 0.4, 0}, line));
  CHECK_FALSE(augmented_ball_contains(ball, {1.0, 0.6, 0}, line));
  CHECK_FALSE(augmented_ball_contains(ball, {1.5, 0.0, 0}, line));
}

TEST_CASE("neighbor order properties on random instances") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MetricSpace box = MetricSpace::box({0.0, 0.0}, {1.0, 1.0});
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<AugmentedPoint> pts;
    for (std::size_t i = 0; i < 40; ++i) {
      // coarse coordinates force distance ties
      const double a = std::floor(u(gen) * 4) / 4, b = std::floor(u(gen) * 4) / 4;
      pts.push_back({std::vector<double>{a, b}, std::floor(u(gen) * 3) / 3, i});
    }
    const Point q = std::vector<double>{u(gen), u(gen)};
    const auto order = neighbor_order(box, q, pts);

    // brute force on (distance, z, index)
    std::vector<std::size_t> brute(pts.size());
    for (std::size_t i = 0; i < brute.size(); ++i) brute[i] = i;
    std::sort(brute.begin(), brute.end(), [&](std::size_t i, std::size_t j) {
      const double di = box.distance(q, pts[i].location), dj = box.distance(q, pts[j].location);
      if (di != dj) return di < dj;
      if (pts[i].z != pts[j].z) return pts[i].z < pts[j].z;
      return i < j;
    });
    CHECK(order == brute);

    // scaling invariance
    CHECK(neighbor_order(box.scaled(3.7), q, pts) == order);

    // first k+1 points = augmented ball at the (k+1)-th point plus that point
    for (std::size_t k = 1; k < pts.size(); k += 7) {
      const AugmentedPoint& kth = pts[order[k]];
      const AugmentedBall ball{q, box.distance(q, kth.location), kth.z};
      std::size_t inside = 0;
      bool prefix_ok = true;
      for (std::size_t pos = 0; pos < pts.size(); ++pos) {
        const bool in = augmented_ball_contains(ball, pts[order[pos]], box);
        inside += in;
        if (pos < k && !in && !(pts[order[pos]].z == kth.z)) prefix_ok = false;
      }
      CHECK(prefix_ok);
      CHECK(inside <= k);
    }
  }
}
