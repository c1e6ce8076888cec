#include "cec/synthetic.hpp"

#include "cec/rng.hpp"

#include <random>
#include <stdexcept>
#include <vector>

namespace cec {

namespace {

constexpr double kMaxAnchorDot = 0.9;
constexpr int kMaxAnchorAttempts = 1000;

Matrix draw_anchors(int k, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < kMaxAnchorAttempts; ++attempt) {
    Matrix anchors(k, d);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < d; ++j) anchors(i, j) = gauss(rng);
      anchors.row(i).normalize();
    }
    bool separated = true;
    for (int a = 0; a < k && separated; ++a) {
      for (int b = a + 1; b < k; ++b) {
        if (anchors.row(a).dot(anchors.row(b)) > kMaxAnchorDot) {
          separated = false;
          break;
        }
      }
    }
    if (separated) return anchors;
  }
  throw std::runtime_error("could not place separated class anchors; dimension too small for class count");
}

}  // namespace

std::pair<EmbeddingPool, ClassHead> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Matrix anchors = draw_anchors(spec.num_classes, spec.dim, rng);

  Eigen::VectorXd weights(spec.num_classes);
  for (int i = 0; i < spec.num_classes; ++i) weights[i] = spec.class_weights[static_cast<std::size_t>(i)];

  Matrix vectors(spec.pool_size, spec.dim);
  std::vector<int> labels(static_cast<std::size_t>(spec.pool_size));
  Vector sample(spec.dim);
  for (int i = 0; i < spec.pool_size; ++i) {
    const int y = weighted_pick(weights, 1.0, rng);
    labels[static_cast<std::size_t>(i)] = y;
    const bool outlier = unit(rng) < spec.outlier_fraction;
    for (int j = 0; j < spec.dim; ++j) sample[j] = gauss(rng);
    if (outlier) {
      sample.normalize();
      vectors.row(i) = sample;
    } else {
      vectors.row(i) = anchors.row(y) + spec.cluster_spread * sample.transpose();
    }
    for (int j = 0; j < spec.dim; ++j) vectors(i, j) = quantize_f32(vectors(i, j));
  }

  ClassHead head;
  head.class_embeddings = anchors.unaryExpr([](double v) { return quantize_f32(v); });
  head.temperature = 0.01;
  head.validate();

  EmbeddingPool pool = make_pool(std::move(vectors), std::move(labels), spec.num_classes);
  return {std::move(pool), std::move(head)};
}

}  // namespace cec
