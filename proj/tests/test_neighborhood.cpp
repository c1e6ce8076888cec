#include "cec/neighborhood.hpp"

#include "cec/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace cec;

namespace {

Matrix random_unit_rows(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = gauss(rng);
    m.row(i).normalize();
  }
  return m;
}

// O(n^2) reference scan with direct squared distances.
void brute_force_knn(const Matrix& points, int k, IntMatrix& ids, Matrix& dists) {
  const int n = static_cast<int>(points.rows());
  ids.resize(n, k);
  dists.resize(n, k);
  std::vector<std::pair<double, int>> all;
  for (int i = 0; i < n; ++i) {
    all.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      all.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    }
    std::sort(all.begin(), all.end());
    for (int c = 0; c < k; ++c) {
      dists(i, c) = all[static_cast<std::size_t>(c)].first;
      ids(i, c) = all[static_cast<std::size_t>(c)].second;
    }
  }
}

Matrix circle_points(const std::vector<double>& angles) {
  Matrix m(static_cast<Eigen::Index>(angles.size()), 2);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = std::cos(angles[i]);
    m(static_cast<Eigen::Index>(i), 1) = std::sin(angles[i]);
  }
  return m;
}

}  // namespace

TEST_CASE("knn picks the nearer of two candidates") {
  // unit circle: chord to 60deg is 1, chord to 180deg is 2
  const double pi = std::acos(-1.0);
  const EmbeddingPool pool = make_pool(circle_points({0.0, pi / 3.0, pi}));
  const NeighborGraph graph = knn(pool, 1);
  CHECK(graph.neighbor_ids(0, 0) == 1);
  CHECK(graph.sq_dists(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(graph.neighbor_ids(2, 0) == 1);
}

TEST_CASE("duplicate point is the zero-distance neighbor") {
  Matrix m(3, 2);
  m << 1, 0, 1, 0, 0, 1;
  const NeighborGraph graph = knn(make_pool(m), 1);
  CHECK(graph.neighbor_ids(0, 0) == 1);
  CHECK(graph.sq_dists(0, 0) == 0.0);
  CHECK(graph.neighbor_ids(1, 0) == 0);  // self excluded, tie rule irrelevant here
}

TEST_CASE("knn matches the O(n^2) oracle on random pools") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Matrix points = random_unit_rows(200, 16, seed);
    const EmbeddingPool pool = make_pool(points);
    const NeighborGraph graph = knn(pool, 10);

    IntMatrix oracle_ids;
    Matrix oracle_dists;
    brute_force_knn(points, 10, oracle_ids, oracle_dists);
    CHECK(graph.neighbor_ids == oracle_ids);
    CHECK((graph.sq_dists - oracle_dists).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("knn rejects k out of range and keeps distances sorted in [0,4]") {
  const Matrix points = random_unit_rows(50, 8, 9);
  const EmbeddingPool pool = make_pool(points);
  CHECK_THROWS_AS(knn(pool, 50), std::invalid_argument);
  CHECK_THROWS_AS(knn(pool, 0), std::invalid_argument);

  const NeighborGraph graph = knn(pool, 7);
  for (Eigen::Index i = 0; i < graph.size(); ++i) {
    for (int c = 0; c < graph.k(); ++c) {
      CHECK(graph.sq_dists(i, c) >= 0.0);
      CHECK(graph.sq_dists(i, c) <= 4.0);
      if (c > 0) CHECK(graph.sq_dists(i, c) >= graph.sq_dists(i, c - 1));
      CHECK(graph.neighbor_ids(i, c) != static_cast<int>(i));
    }
  }
}

TEST_CASE("knn is invariant under pool permutation after relabeling") {
  const Matrix points = random_unit_rows(60, 6, 4);
  const NeighborGraph graph = knn(make_pool(points), 5);

  std::mt19937_64 rng(77);
  std::vector<int> perm(60);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix shuffled(60, 6);
  for (int i = 0; i < 60; ++i) shuffled.row(perm[static_cast<std::size_t>(i)]) = points.row(i);
  const NeighborGraph shuffled_graph = knn(make_pool(shuffled), 5);

  for (int i = 0; i < 60; ++i) {
    for (int c = 0; c < 5; ++c) {
      CHECK(shuffled_graph.neighbor_ids(perm[static_cast<std::size_t>(i)], c) ==
            perm[static_cast<std::size_t>(graph.neighbor_ids(i, c))]);
      CHECK(shuffled_graph.sq_dists(perm[static_cast<std::size_t>(i)], c) ==
            doctest::Approx(graph.sq_dists(i, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("neighbor uncertainty hand fixture") {
  NeighborGraph graph;
  graph.neighbor_ids.resize(1, 2);
  graph.neighbor_ids << 1, 2;
  graph.sq_dists.resize(1, 2);
  graph.sq_dists << 1.0, 4.0;
  // entries for ids 1 and 2 carry the neighbor entropies; the query's own
  // entry is unused by the kernel sum
  Vector entropies(3);
  entropies << 0.0, 1.0, 0.5;

  NeighborGraph padded;  // extend to 3 rows so lengths match
  padded.neighbor_ids.resize(3, 2);
  padded.neighbor_ids << 1, 2, 0, 2, 0, 1;
  padded.sq_dists.resize(3, 2);
  padded.sq_dists << 1.0, 4.0, 1.0, 1.0, 4.0, 1.0;

  const Vector h_nn = neighbor_uncertainty(padded, entropies, 0.1);
  const double oracle = (std::exp(-0.1 * 1.0) * 1.0 + std::exp(-0.1 * 4.0) * 0.5) / 2.0;
  CHECK(h_nn[0] == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(h_nn[0] == doctest::Approx(0.620000).epsilon(2.1e-6));  // 6-digit rounding of the oracle
  CHECK(oracle == doctest::Approx(0.6199987205268896).epsilon(1e-15));
}

TEST_CASE("zero distances average the neighbor entropies; large alpha kills the kernel") {
  NeighborGraph graph;
  graph.neighbor_ids.resize(3, 2);
  graph.neighbor_ids << 1, 2, 0, 2, 0, 1;
  graph.sq_dists = Matrix::Zero(3, 2);
  Vector entropies(3);
  entropies << 0.3, 0.9, 0.6;
  const Vector h_nn = neighbor_uncertainty(graph, entropies, 0.5);
  CHECK(h_nn[0] == doctest::Approx((0.9 + 0.6) / 2.0).epsilon(1e-12));

  NeighborGraph far = graph;
  far.sq_dists = Matrix::Constant(3, 2, 2.0);
  const Vector decayed = neighbor_uncertainty(far, entropies, 1e6);
  CHECK(decayed.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("neighbor uncertainty is nonincreasing in alpha and bounded by max entropy") {
  const Matrix points = random_unit_rows(80, 8, 21);
  const EmbeddingPool pool = make_pool(points);
  const NeighborGraph graph = knn(pool, 6);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.5);
  Vector entropies(80);
  for (int i = 0; i < 80; ++i) entropies[i] = unit(rng);

  Vector previous = neighbor_uncertainty(graph, entropies, 0.01);
  const double max_h = entropies.maxCoeff();
  for (double alpha : {0.05, 0.1, 0.5, 1.0, 5.0}) {
    const Vector current = neighbor_uncertainty(graph, entropies, alpha);
    for (int i = 0; i < 80; ++i) {
      CHECK(current[i] <= previous[i] + 1e-12);
      CHECK(current[i] >= 0.0);
      CHECK(current[i] <= max_h + 1e-12);
    }
    previous = current;
  }

  const UncertaintyReport report = combined_uncertainty(entropies, previous, 6, 5.0);
  CHECK(report.combined.maxCoeff() <= 2.0 * max_h + 1e-12);
}

TEST_CASE("combined uncertainty adds componentwise") {
  Vector self(2), nn(2);
  self << 1.0, 2.0;
  nn << 0.5, 0.5;
  const UncertaintyReport report = combined_uncertainty(self, nn, 3, 0.1);
  CHECK(report.combined[0] == 1.5);
  CHECK(report.combined[1] == 2.5);
  CHECK(report.k == 3);
  CHECK(report.alpha == 0.1);

  const UncertaintyReport zeros = combined_uncertainty(Vector::Zero(4), Vector::Zero(4), 1, 1.0);
  CHECK(zeros.combined.isZero(0.0));

  Vector short_vec(1);
  CHECK_THROWS_AS(combined_uncertainty(self, short_vec, 1, 1.0), std::invalid_argument);
}

TEST_CASE("an isolated high-entropy outlier ranks below a dense uncertain region by U") {
  // four clustered points plus one outlier on the far side of the circle
  const double pi = std::acos(-1.0);
  const Matrix points = circle_points({0.0, 0.06, 0.12, 0.18, pi});
  Vector self(5);
  self << 0.8, 0.8, 0.8, 0.8, 1.0;  // the outlier has the highest self entropy

  const NeighborGraph graph = knn(make_pool(points), 2);
  const Vector h_nn = neighbor_uncertainty(graph, self, 1.0);
  const UncertaintyReport report = combined_uncertainty(self, h_nn, 2, 1.0);

  // brute-force evaluation of the kernel sum for every sample
  for (int i = 0; i < 5; ++i) {
    std::vector<std::pair<double, int>> dists;
    for (int j = 0; j < 5; ++j) {
      if (j != i) dists.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
    }
    std::sort(dists.begin(), dists.end());
    double expected = 0.0;
    for (int c = 0; c < 2; ++c) expected += std::exp(-1.0 * dists[static_cast<std::size_t>(c)].first) * self[dists[static_cast<std::size_t>(c)].second];
    expected /= 2.0;
    CHECK(h_nn[i] == doctest::Approx(expected).epsilon(1e-12));
  }

  Eigen::Index top_self = 0, top_combined = 0;
  self.maxCoeff(&top_self);
  report.combined.maxCoeff(&top_combined);
  CHECK(top_self == 4);
  CHECK(top_combined != 4);  // ranking flips once neighborhood kicks in
}
