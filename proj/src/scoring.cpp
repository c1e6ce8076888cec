#include "cec/scoring.hpp"

#include "cec/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cec {

namespace {

constexpr double kPriorFloor = 1e-8;
constexpr double kRowSumTolerance = 1e-6;

}  // namespace

void ProbabilityTable::validate() const {
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      const double p = probs(i, j);
      if (!(p >= 0.0 && p <= 1.0 + 1e-12)) {
        throw std::invalid_argument("probability out of [0,1] at row " + std::to_string(i));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("probability row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
}

Matrix cosine_similarities(const EmbeddingPool& pool, const ClassHead& head) {
  if (pool.dim() != head.dim()) {
    throw std::invalid_argument("dimension mismatch: pool has d=" + std::to_string(pool.dim()) + ", head has d=" +
                                std::to_string(head.dim()));
  }
  const Matrix z = normalize_matrix_rows(pool.vectors);
  const Matrix t = normalize_matrix_rows(head.class_embeddings);
  return z * t.transpose();
}

ProbabilityTable zero_shot_probs(const EmbeddingPool& pool, const ClassHead& head) {
  Matrix logits = cosine_similarities(pool, head) / head.temperature;
  ProbabilityTable table;
  table.probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double max_logit = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      const double e = std::exp(logits(i, j) - max_logit);
      table.probs(i, j) = e;
      sum += e;
    }
    table.probs.row(i) /= sum;
  }
  table.calibrated = false;
  return table;
}

double entropy(const Eigen::Ref<const Vector>& p) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < -1e-12) throw std::invalid_argument("negative probability in entropy input");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    throw std::invalid_argument("entropy input sums to " + std::to_string(sum) + ", expected 1");
  }
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h < 0.0 ? 0.0 : h;
}

Vector row_entropies(const ProbabilityTable& table) {
  Vector h(table.size());
  for (Eigen::Index i = 0; i < table.size(); ++i) h[i] = entropy(table.probs.row(i).transpose());
  return h;
}

ContextPrior contextualized_prior(const ProbabilityTable& probs, int top_n) {
  if (probs.calibrated) throw std::invalid_argument("contextualized prior expects uncalibrated probabilities");
  const Eigen::Index n = probs.size();
  if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");
  if (top_n > n) {
    throw std::invalid_argument("top_n=" + std::to_string(top_n) + " exceeds pool size " + std::to_string(n));
  }
  ContextPrior prior;
  prior.top_n = top_n;
  prior.q.resize(probs.num_classes());
  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < probs.num_classes(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    // ties broken by lower sample index
    std::partial_sort(order.begin(), order.begin() + top_n, order.end(), [&](int a, int b) {
      const double pa = probs.probs(a, c), pb = probs.probs(b, c);
      return pa != pb ? pa > pb : a < b;
    });
    double sum = 0.0;
    for (int r = 0; r < top_n; ++r) sum += probs.probs(order[static_cast<std::size_t>(r)], c);
    prior.q[c] = std::max(sum / top_n, kPriorFloor);
  }
  return prior;
}

ProbabilityTable calibrate(const ProbabilityTable& probs, const ContextPrior& prior) {
  if (probs.calibrated) throw std::invalid_argument("probabilities are already calibrated");
  if (prior.q.size() != probs.num_classes()) throw std::invalid_argument("prior size does not match class count");
  for (Eigen::Index c = 0; c < prior.q.size(); ++c) {
    if (!(prior.q[c] > 0.0)) throw std::invalid_argument("prior q must be strictly positive");
  }
  ProbabilityTable out;
  out.probs.resize(probs.size(), probs.num_classes());
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    double denom = 0.0;
    for (Eigen::Index c = 0; c < probs.num_classes(); ++c) {
      const double ratio = probs.probs(i, c) / prior.q[c];
      out.probs(i, c) = ratio;
      denom += ratio;
    }
    out.probs.row(i) /= denom;
  }
  out.calibrated = true;
  return out;
}

Vector calibrated_entropy(const EmbeddingPool& pool, const ClassHead& head, int top_n) {
  const ProbabilityTable raw = zero_shot_probs(pool, head);
  const ContextPrior prior = contextualized_prior(raw, top_n);
  return row_entropies(calibrate(raw, prior));
}

}  // namespace cec
