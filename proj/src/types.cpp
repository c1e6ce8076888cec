#include "cec/types.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace cec {

void EmbeddingPool::validate() const {
  const Eigen::Index n = vectors.rows();
  const Eigen::Index d = vectors.cols();
  if (n < 1) throw DataError("pool is empty (n must be >= 1)");
  if (d < 2) throw DataError("pool dimension must be >= 2, got " + std::to_string(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!std::isfinite(vectors(i, j))) {
        std::ostringstream msg;
        msg << "non-finite value at row " << i << ", column " << j;
        throw DataError(msg.str());
      }
    }
  }
  if (ids.size() != static_cast<std::size_t>(n)) throw DataError("ids length does not match pool size");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ids[static_cast<std::size_t>(i)] != static_cast<int>(i)) throw DataError("ids must be 0..n-1");
  }
  if (labels) {
    if (labels->size() != static_cast<std::size_t>(n)) throw DataError("label vector length does not match pool size");
    const int k = num_classes.value_or(0);
    if (k < 2) throw DataError("labeled pool must declare num_classes >= 2");
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = (*labels)[static_cast<std::size_t>(i)];
      if (y < 0 || y >= k) {
        std::ostringstream msg;
        msg << "label " << y << " out of range [0," << k << ") at row " << i;
        throw DataError(msg.str());
      }
    }
  }
}

EmbeddingPool make_pool(Matrix vectors, std::optional<std::vector<int>> labels,
                        std::optional<int> num_classes) {
  EmbeddingPool pool;
  pool.vectors = std::move(vectors);
  pool.labels = std::move(labels);
  pool.num_classes = num_classes;
  if (pool.labels && !pool.num_classes) {
    int max_label = 0;
    for (int y : *pool.labels) max_label = std::max(max_label, y);
    pool.num_classes = max_label + 1;
  }
  pool.ids.resize(static_cast<std::size_t>(pool.vectors.rows()));
  std::iota(pool.ids.begin(), pool.ids.end(), 0);
  pool.validate();
  return pool;
}

EmbeddingPool subset_pool(const EmbeddingPool& pool, const std::vector<int>& rows) {
  Matrix sub(static_cast<Eigen::Index>(rows.size()), pool.dim());
  std::optional<std::vector<int>> labels;
  if (pool.labels) labels.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    if (r < 0 || r >= pool.size()) throw std::invalid_argument("subset row " + std::to_string(r) + " out of range");
    sub.row(static_cast<Eigen::Index>(i)) = pool.vectors.row(r);
    if (labels) labels->push_back((*pool.labels)[static_cast<std::size_t>(r)]);
  }
  return make_pool(std::move(sub), std::move(labels), pool.num_classes);
}

void ClassHead::validate() const {
  const Eigen::Index k = class_embeddings.rows();
  const Eigen::Index d = class_embeddings.cols();
  if (k < 2) throw DataError("class head must have K >= 2 rows, got " + std::to_string(k));
  if (d < 2) throw DataError("class head dimension must be >= 2, got " + std::to_string(d));
  if (!(temperature > 0.0)) throw DataError("temperature must be positive");
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!std::isfinite(class_embeddings(i, j))) {
        throw DataError("non-finite class embedding at row " + std::to_string(i));
      }
    }
    if (class_embeddings.row(i).norm() == 0.0) {
      throw DataError("zero class embedding at row " + std::to_string(i));
    }
  }
}

void SyntheticSpec::validate() const {
  if (num_classes < 2) throw ConfigError("synthetic spec needs num_classes >= 2");
  if (dim < 2) throw ConfigError("synthetic spec needs dim >= 2");
  if (pool_size < num_classes) throw ConfigError("synthetic spec needs pool_size >= num_classes");
  if (class_weights.size() != static_cast<std::size_t>(num_classes)) {
    throw ConfigError("class_weights must have num_classes entries");
  }
  double total = 0.0;
  for (double w : class_weights) {
    if (!(w >= 0.0)) throw ConfigError("class weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("class weights must sum to 1 within 1e-9");
  if (!(cluster_spread > 0.0)) throw ConfigError("cluster_spread must be positive");
  if (outlier_fraction < 0.0 || outlier_fraction >= 1.0) throw ConfigError("outlier_fraction must be in [0,1)");
}

std::vector<double> normalize_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("class weights must be nonnegative");
    total += w;
  }
  if (total <= 0.0) throw ConfigError("class weights must have a positive sum");
  for (double& w : weights) w /= total;
  return weights;
}

}  // namespace cec
