#include "cec/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cec;

TEST_CASE("generator is deterministic for a fixed seed") {
  SyntheticSpec spec;
  spec.num_classes = 2;
  spec.dim = 8;
  spec.pool_size = 100;
  spec.class_weights = {0.5, 0.5};
  spec.cluster_spread = 0.3;
  spec.seed = 7;

  const auto [pool_a, head_a] = generate_synthetic(spec);
  const auto [pool_b, head_b] = generate_synthetic(spec);
  CHECK(pool_a.vectors == pool_b.vectors);  // bit-identical
  CHECK(*pool_a.labels == *pool_b.labels);
  CHECK(head_a.class_embeddings == head_b.class_embeddings);
}

TEST_CASE("degenerate mixture puts every sample in class 0") {
  SyntheticSpec spec;
  spec.num_classes = 2;
  spec.dim = 4;
  spec.pool_size = 200;
  spec.class_weights = {1.0, 0.0};
  spec.cluster_spread = 0.2;
  spec.seed = 3;

  const auto [pool, head] = generate_synthetic(spec);
  for (int y : *pool.labels) CHECK(y == 0);
}

TEST_CASE("per-class counts stay within multinomial 3-sigma") {
  SyntheticSpec spec;
  spec.num_classes = 10;
  spec.dim = 32;
  spec.pool_size = 5000;
  spec.class_weights = normalize_weights({10, 10, 10, 10, 10, 10, 10, 10, 10, 1});
  spec.cluster_spread = 0.3;
  spec.seed = 1;

  const auto [pool, head] = generate_synthetic(spec);
  std::vector<int> counts(10, 0);
  for (int y : *pool.labels) ++counts[static_cast<std::size_t>(y)];
  for (int c = 0; c < 10; ++c) {
    const double w = spec.class_weights[static_cast<std::size_t>(c)];
    const double expectation = spec.pool_size * w;          // exact multinomial expectation
    const double sigma = std::sqrt(spec.pool_size * w * (1.0 - w));
    CHECK(std::abs(counts[static_cast<std::size_t>(c)] - expectation) <= 3.0 * sigma);
  }
}

TEST_CASE("anchors are unit norm and pairwise separated") {
  SyntheticSpec spec;
  spec.num_classes = 10;
  spec.dim = 32;
  spec.pool_size = 100;
  spec.class_weights = std::vector<double>(10, 0.1);
  spec.cluster_spread = 0.3;
  spec.seed = 2;

  const auto [pool, head] = generate_synthetic(spec);
  for (Eigen::Index i = 0; i < head.num_classes(); ++i) {
    CHECK(head.class_embeddings.row(i).norm() == doctest::Approx(1.0).epsilon(1e-6));
    for (Eigen::Index j = i + 1; j < head.num_classes(); ++j) {
      CHECK(head.class_embeddings.row(i).dot(head.class_embeddings.row(j)) <= 0.9 + 1e-7);
    }
  }
}

TEST_CASE("with no outliers every sample hugs its anchor; tiny spread matches nearest anchor") {
  SyntheticSpec spec;
  spec.num_classes = 4;
  spec.dim = 16;
  spec.pool_size = 400;
  spec.class_weights = std::vector<double>(4, 0.25);
  spec.cluster_spread = 1e-4;
  spec.outlier_fraction = 0.0;
  spec.seed = 13;

  const auto [pool, head] = generate_synthetic(spec);
  for (Eigen::Index i = 0; i < pool.size(); ++i) {
    const int y = (*pool.labels)[static_cast<std::size_t>(i)];
    const double dist_to_own = (pool.vectors.row(i) - head.class_embeddings.row(y)).norm();
    CHECK(dist_to_own < 0.01);
    Eigen::Index nearest = 0;
    (head.class_embeddings.rowwise() - pool.vectors.row(i)).rowwise().squaredNorm().minCoeff(&nearest);
    CHECK(static_cast<int>(nearest) == y);
  }
}

TEST_CASE("outlier_fraction=1-epsilon scatters samples onto the unit sphere") {
  SyntheticSpec spec;
  spec.num_classes = 2;
  spec.dim = 8;
  spec.pool_size = 100;
  spec.class_weights = {0.5, 0.5};
  spec.cluster_spread = 0.01;
  spec.outlier_fraction = 0.999;
  spec.seed = 21;

  const auto [pool, head] = generate_synthetic(spec);
  int on_sphere = 0;
  for (Eigen::Index i = 0; i < pool.size(); ++i) {
    if (std::abs(pool.vectors.row(i).norm() - 1.0) < 1e-6) ++on_sphere;
  }
  CHECK(on_sphere >= 95);
}

TEST_CASE("invalid specs are rejected") {
  SyntheticSpec spec;
  spec.num_classes = 3;
  spec.dim = 4;
  spec.pool_size = 10;
  spec.class_weights = {0.5, 0.5};  // wrong length
  CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);

  spec.class_weights = {0.5, 0.4, 0.2};  // sums to 1.1
  CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);

  spec.class_weights = {0.4, 0.4, 0.2};
  spec.pool_size = 2;  // fewer samples than classes
  CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
}
