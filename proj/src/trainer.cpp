#include "cec/trainer.hpp"

#include "cec/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cec {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(lr >= 0.0)) throw ConfigError("lr must be nonnegative");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0,1)");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be nonnegative");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

namespace {

// Softmax rows of cos(z, t)/T for unit features and raw head rows.
Matrix probs_for(const Matrix& features_unit, const Matrix& head_rows, double temperature) {
  const Matrix head_unit = normalize_matrix_rows(head_rows);
  Matrix logits = (features_unit * head_unit.transpose()) / temperature;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - m).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

}  // namespace

double cross_entropy_loss(const Matrix& features_unit, const std::vector<int>& labels, const Matrix& head_rows,
                          double temperature) {
  const Matrix p = probs_for(features_unit, head_rows, temperature);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    loss -= std::log(std::max(p(i, labels[static_cast<std::size_t>(i)]), 1e-300));
  }
  return loss / static_cast<double>(p.rows());
}

std::pair<double, Matrix> cross_entropy_loss_grad(const Matrix& features_unit, const std::vector<int>& labels,
                                                  const Matrix& head_rows, double temperature) {
  const Eigen::Index n = features_unit.rows();
  const Eigen::Index k = head_rows.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw std::invalid_argument("labels length mismatch");

  const Vector head_norms = head_rows.rowwise().norm();
  const Matrix head_unit = normalize_matrix_rows(head_rows);
  const Matrix sims = features_unit * head_unit.transpose();  // n x K cosines
  Matrix p = sims / temperature;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }

  double loss = 0.0;
  Matrix dl_dsim(n, k);  // d(mean CE)/d(cos_{x,i}); softmax jacobian folds to (p - y)/T
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    loss -= std::log(std::max(p(i, y), 1e-300));
    for (Eigen::Index c = 0; c < k; ++c) {
      dl_dsim(i, c) = (p(i, c) - (c == y ? 1.0 : 0.0)) / (temperature * static_cast<double>(n));
    }
  }
  loss /= static_cast<double>(n);

  // d cos(z, t_i)/d t_i = (z - cos * t_unit) / ||t_i||
  Matrix grad = dl_dsim.transpose() * features_unit;  // sum_x coef * z_x
  for (Eigen::Index c = 0; c < k; ++c) {
    const double diag = dl_dsim.col(c).dot(sims.col(c));  // sum_x coef * cos_{x,c}
    grad.row(c) = (grad.row(c) - diag * head_unit.row(c)) / head_norms[c];
  }
  return {loss, std::move(grad)};
}

TrainedHead train_head(const EmbeddingPool& pool, const std::vector<int>& labeled_ids, const ClassHead& init,
                       const TrainConfig& cfg) {
  cfg.validate();
  if (labeled_ids.empty()) throw std::invalid_argument("labeled set is empty");
  if (!pool.labels) throw DataError("pool has no ground-truth labels to train on");
  if (pool.dim() != init.dim()) throw std::invalid_argument("pool/head dimension mismatch");

  const Eigen::Index n = static_cast<Eigen::Index>(labeled_ids.size());
  Matrix features(n, pool.dim());
  std::vector<int> labels(labeled_ids.size());
  const int num_classes = static_cast<int>(init.num_classes());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int id = labeled_ids[static_cast<std::size_t>(i)];
    if (id < 0 || id >= pool.size()) throw std::invalid_argument("labeled id " + std::to_string(id) + " out of range");
    features.row(i) = pool.vectors.row(id);
    const int y = (*pool.labels)[static_cast<std::size_t>(id)];
    if (y < 0 || y >= num_classes) throw DataError("label " + std::to_string(y) + " outside head classes");
    labels[static_cast<std::size_t>(i)] = y;
  }
  features = normalize_matrix_rows(features);

  TrainedHead out;
  out.head.temperature = init.temperature;
  Matrix head = normalize_matrix_rows(init.class_embeddings);
  Matrix velocity = Matrix::Zero(head.rows(), head.cols());

  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  out.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.cosine_schedule ? cosine_lr(cfg.lr, epoch, cfg.epochs) : cfg.lr;
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index size = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Matrix batch(size, features.cols());
      std::vector<int> batch_labels(static_cast<std::size_t>(size));
      for (Eigen::Index r = 0; r < size; ++r) {
        batch.row(r) = features.row(order[static_cast<std::size_t>(start + r)]);
        batch_labels[static_cast<std::size_t>(r)] = labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + r)])];
      }
      auto [loss, grad] = cross_entropy_loss_grad(batch, batch_labels, head, init.temperature);
      epoch_loss += loss * static_cast<double>(size);

      grad += cfg.weight_decay * head;
      velocity = cfg.momentum * velocity + grad;
      head -= lr * velocity;
      head = normalize_matrix_rows(head);
    }
    out.loss_trace.push_back(epoch_loss / static_cast<double>(n));
  }

  out.head.class_embeddings = std::move(head);
  out.head.validate();
  return out;
}

double evaluate(const ClassHead& head, const EmbeddingPool& pool, const std::vector<int>& eval_ids) {
  if (eval_ids.empty()) throw std::invalid_argument("eval set is empty");
  if (!pool.labels) throw DataError("pool has no ground-truth labels to evaluate against");
  const Matrix head_unit = normalize_matrix_rows(head.class_embeddings);
  int correct = 0;
  for (int id : eval_ids) {
    if (id < 0 || id >= pool.size()) throw std::invalid_argument("eval id " + std::to_string(id) + " out of range");
    const Vector z = pool.vectors.row(id).transpose();
    const double norm = z.norm();
    if (norm == 0.0) throw DataError("zero-norm row " + std::to_string(id) + " cannot be classified");
    Eigen::Index argmax = 0;
    (head_unit * (z / norm)).maxCoeff(&argmax);
    if (static_cast<int>(argmax) == (*pool.labels)[static_cast<std::size_t>(id)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(eval_ids.size());
}

double cosine_lr(double lr0, int epoch, int epochs) {
  return lr0 * 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(epoch) / static_cast<double>(epochs)));
}

}  // namespace cec
