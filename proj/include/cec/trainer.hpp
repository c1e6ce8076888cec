#pragma once

#include "cec/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace cec {

struct TrainConfig {
  int epochs = 200;
  double lr = 0.002;
  double momentum = 0.9;
  double weight_decay = 0.005;
  int batch_size = 32;
  bool cosine_schedule = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainedHead {
  ClassHead head;                  // rows unit-norm
  std::vector<double> loss_trace;  // mean loss per epoch
};

// Mean cross-entropy of softmax(cos(z, t_i)/T) over the given samples, and
// its gradient with respect to the raw class-embedding rows (the cosine's
// row normalization is part of the function being differentiated).
// `features_unit` rows must be unit-norm.
double cross_entropy_loss(const Matrix& features_unit, const std::vector<int>& labels, const Matrix& head_rows,
                          double temperature);
std::pair<double, Matrix> cross_entropy_loss_grad(const Matrix& features_unit, const std::vector<int>& labels,
                                                  const Matrix& head_rows, double temperature);

// Learns class embeddings on the labeled subset by mini-batch SGD with
// momentum, weight decay, and an optional cosine-annealed learning rate.
// Rows are re-normalized after every step; cosine similarity is scale
// invariant per row, so renormalization never changes predictions.
TrainedHead train_head(const EmbeddingPool& pool, const std::vector<int>& labeled_ids, const ClassHead& init,
                       const TrainConfig& cfg);

// Top-1 accuracy of argmax cosine/temperature probability over eval_ids.
double evaluate(const ClassHead& head, const EmbeddingPool& pool, const std::vector<int>& eval_ids);

// Cosine-annealed learning rate for epoch e of `epochs`.
double cosine_lr(double lr0, int epoch, int epochs);

}  // namespace cec
