#pragma once

#include "cec/types.hpp"

namespace cec {

// Per-sample class probabilities. Rows sum to 1; `calibrated` tells raw
// softmax output apart from prior-corrected output.
struct ProbabilityTable {
  Matrix probs;  // n x K
  bool calibrated = false;

  Eigen::Index size() const { return probs.rows(); }
  Eigen::Index num_classes() const { return probs.cols(); }
  void validate() const;
};

// Per-class prior estimated from the top_n highest probabilities per class.
struct ContextPrior {
  Vector q;  // K entries in (0, 1]
  int top_n = 10;
};

// n x K cosine similarities between pool rows and head rows.
Matrix cosine_similarities(const EmbeddingPool& pool, const ClassHead& head);

// Softmax over cosine similarity / temperature per row.
ProbabilityTable zero_shot_probs(const EmbeddingPool& pool, const ClassHead& head);

// Shannon entropy with natural log; 0*log(0) is 0. Input must sum to 1
// within 1e-6.
double entropy(const Eigen::Ref<const Vector>& p);
Vector row_entropies(const ProbabilityTable& table);

// Mean of the top_n largest values in each class column (sets may overlap
// between classes). Values floored at 1e-8.
ContextPrior contextualized_prior(const ProbabilityTable& probs, int top_n);

// P_hat(i|x) = (P(i|x)/q_i) / sum_j (P(j|x)/q_j).
ProbabilityTable calibrate(const ProbabilityTable& probs, const ContextPrior& prior);

// Entropy of calibrated probabilities: zero_shot_probs -> contextualized_prior
// -> calibrate -> row entropies.
Vector calibrated_entropy(const EmbeddingPool& pool, const ClassHead& head, int top_n);

}  // namespace cec
