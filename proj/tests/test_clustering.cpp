#include "cec/clustering.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace cec;

namespace {

Matrix random_points(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

// Reference Lloyd iterations on an unweighted point set: direct distance
// loops, plain means, same convergence rule as the implementation. Bails out
// if a cluster empties, which the random fixtures below never hit.
struct OracleResult {
  Matrix centroids;
  std::vector<int> assignment;
  bool hit_empty = false;
};

OracleResult unweighted_lloyd_oracle(const Matrix& points, Matrix centroids) {
  const int n = static_cast<int>(points.rows());
  const int b = static_cast<int>(centroids.rows());
  OracleResult result;
  result.assignment.assign(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < kKMeansMaxIters; ++iter) {
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < b; ++c) {
        const double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.assignment[static_cast<std::size_t>(i)] = best;
    }
    Matrix sums = Matrix::Zero(b, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(b), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(result.assignment[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(result.assignment[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < b; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        result.hit_empty = true;
        result.centroids = centroids;
        return result;
      }
      sums.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    const double shift = (sums - centroids).norm() / std::max(centroids.norm(), 1e-30);
    centroids = sums;
    if (shift < kCentroidShiftTol) break;
  }
  result.centroids = centroids;
  return result;
}

}  // namespace

TEST_CASE("uniform weights reproduce unweighted k-means from the same init") {
  const Matrix points = random_points(60, 4, 11);
  const Vector ones = Vector::Ones(60);
  const std::vector<int> init_ids = weighted_kmeanspp_indices(points, ones, 5, 3);
  Matrix init(5, 4);
  for (int c = 0; c < 5; ++c) init.row(c) = points.row(init_ids[static_cast<std::size_t>(c)]);

  const ClusterResult weighted = weighted_lloyd(points, ones, init);
  const OracleResult oracle = unweighted_lloyd_oracle(points, init);
  REQUIRE_FALSE(oracle.hit_empty);
  CHECK(weighted.assignment == oracle.assignment);
  CHECK((weighted.centroids - oracle.centroids).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("integer weights match unweighted k-means on the duplicated multiset") {
  std::mt19937_64 rng(2024);
  for (int instance = 0; instance < 10; ++instance) {
    const int n = 30 + static_cast<int>(rng() % 71);  // up to 100
    const int d = 2 + static_cast<int>(rng() % 5);
    const int b = 2 + static_cast<int>(rng() % 7);  // up to 8
    const Matrix points = random_points(n, d, rng());
    Vector weights(n);
    std::vector<int> int_weights(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int_weights[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng() % 5);
      weights[i] = int_weights[static_cast<std::size_t>(i)];
    }

    const std::vector<int> init_ids = weighted_kmeanspp_indices(points, weights, b, rng());
    Matrix init(b, d);
    for (int c = 0; c < b; ++c) init.row(c) = points.row(init_ids[static_cast<std::size_t>(c)]);

    const ClusterResult weighted = weighted_lloyd(points, weights, init);

    // duplicate each point weight-many times
    int total = 0;
    for (int w : int_weights) total += w;
    Matrix duplicated(total, d);
    int row = 0;
    for (int i = 0; i < n; ++i) {
      for (int copy = 0; copy < int_weights[static_cast<std::size_t>(i)]; ++copy) {
        duplicated.row(row++) = points.row(i);
      }
    }
    const OracleResult oracle = unweighted_lloyd_oracle(duplicated, init);
    REQUIRE_FALSE(oracle.hit_empty);
    CHECK((weighted.centroids - oracle.centroids).cwiseAbs().maxCoeff() < 1e-6);

    // weighted objective never increases along the trace
    for (std::size_t t = 1; t < weighted.objective_trace.size(); ++t) {
      CHECK(weighted.objective_trace[t] <= weighted.objective_trace[t - 1] * (1.0 + 1e-9) + 1e-9);
    }
  }
}

TEST_CASE("b = n with distinct points makes every point its own centroid") {
  const Matrix points = random_points(12, 3, 5);
  const Vector weights = Vector::Constant(12, 0.5);
  const ClusterResult result = weighted_kmeans(points, weights, 12, 9);
  std::vector<char> used(12, 0);
  for (int i = 0; i < 12; ++i) {
    const int c = result.assignment[static_cast<std::size_t>(i)];
    CHECK((points.row(i) - result.centroids.row(c)).norm() < 1e-9);
    used[static_cast<std::size_t>(c)] = 1;
  }
  CHECK(std::count(used.begin(), used.end(), 1) == 12);
}

TEST_CASE("fixed seed gives identical clusterings; weight scaling changes nothing") {
  const Matrix points = random_points(80, 6, 31);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  Vector weights(80);
  for (int i = 0; i < 80; ++i) weights[i] = unit(rng);

  const ClusterResult a = weighted_kmeans(points, weights, 6, 12345);
  const ClusterResult b = weighted_kmeans(points, weights, 6, 12345);
  CHECK(a.assignment == b.assignment);
  CHECK(a.centroids == b.centroids);
  CHECK(a.iterations == b.iterations);

  for (double c : {2.0, 0.25, 3.0}) {
    const ClusterResult scaled = weighted_kmeans(points, c * weights, 6, 12345);
    CHECK(scaled.assignment == a.assignment);
    CHECK((scaled.centroids - a.centroids).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("zero weights are floored so every point stays assignable") {
  const Matrix points = random_points(20, 3, 77);
  Vector weights = Vector::Zero(20);
  weights[0] = 1.0;  // only one positive weight
  const ClusterResult result = weighted_kmeans(points, weights, 4, 1);
  CHECK(result.weights_used.minCoeff() == kWeightFloor);
  std::vector<int> counts(4, 0);
  for (int c : result.assignment) ++counts[static_cast<std::size_t>(c)];
  for (int c = 0; c < 4; ++c) CHECK(counts[static_cast<std::size_t>(c)] > 0);
}

TEST_CASE("invalid clustering inputs are rejected") {
  const Matrix points = random_points(5, 2, 1);
  CHECK_THROWS_AS(weighted_kmeans(points, Vector::Ones(5), 6, 0), std::invalid_argument);
  CHECK_THROWS_AS(weighted_kmeans(points, Vector::Ones(5), 0, 0), std::invalid_argument);
  Vector negative = Vector::Ones(5);
  negative[2] = -1.0;
  CHECK_THROWS_AS(weighted_kmeans(points, negative, 2, 0), std::invalid_argument);
}

TEST_CASE("representatives: singleton cluster, equidistant tie, oracle scan") {
  Matrix points(4, 2);
  points << 0, 0, 2, 0, -1, 5, 1, 5;
  ClusterResult result;
  result.centroids.resize(2, 2);
  result.centroids << 1, 0, 0, 5;
  result.assignment = {0, 0, 1, 1};
  result.weights_used = Vector::Ones(4);

  // rows 0 and 1 are both at distance 1 from centroid 0 -> lower index wins;
  // rows 2 and 3 are both at distance 1 from centroid 1
  const std::vector<int> reps = select_cluster_representatives(result, points);
  CHECK(reps == std::vector<int>{0, 2});

  const ClusterResult random_result = weighted_kmeans(random_points(50, 4, 3), Vector::Ones(50), 5, 21);
  const Matrix pts = random_points(50, 4, 3);
  const std::vector<int> picked = select_cluster_representatives(random_result, pts);
  for (int c = 0; c < 5; ++c) {
    const int rep = picked[static_cast<std::size_t>(c)];
    CHECK(random_result.assignment[static_cast<std::size_t>(rep)] == c);
    for (int i = 0; i < 50; ++i) {
      if (random_result.assignment[static_cast<std::size_t>(i)] != c) continue;
      const double rep_d = (pts.row(rep) - random_result.centroids.row(c)).squaredNorm();
      const double other = (pts.row(i) - random_result.centroids.row(c)).squaredNorm();
      CHECK(rep_d <= other + 1e-12);
    }
  }
  // distinct indices
  std::vector<int> sorted = picked;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("most-uncertain selection: tie rule and oracle scan") {
  ClusterResult result;
  result.centroids.resize(2, 2);
  result.centroids << 0, 0, 1, 1;
  result.assignment = {0, 0, 1, 1};
  result.weights_used = Vector::Ones(4);

  const Vector equal = Vector::Ones(4);
  CHECK(select_cluster_most_uncertain(result, equal) == std::vector<int>{0, 2});

  Vector scores(4);
  scores << 0.1, 0.9, 0.4, 0.2;
  CHECK(select_cluster_most_uncertain(result, scores) == std::vector<int>{1, 2});

  const Matrix pts = random_points(40, 3, 15);
  const ClusterResult clustered = weighted_kmeans(pts, Vector::Ones(40), 6, 2);
  std::mt19937_64 rng(64);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector random_scores(40);
  for (int i = 0; i < 40; ++i) random_scores[i] = unit(rng);
  const std::vector<int> picked = select_cluster_most_uncertain(clustered, random_scores);
  for (int c = 0; c < 6; ++c) {
    const int rep = picked[static_cast<std::size_t>(c)];
    CHECK(clustered.assignment[static_cast<std::size_t>(rep)] == c);
    for (int i = 0; i < 40; ++i) {
      if (clustered.assignment[static_cast<std::size_t>(i)] == c) CHECK(random_scores[rep] >= random_scores[i] - 1e-15);
    }
  }
}
