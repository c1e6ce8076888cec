#pragma once

#include "cec/strategies.hpp"
#include "cec/trainer.hpp"
#include "cec/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cec {

// Full experiment configuration. Defaults follow the reference protocol:
// 6 rounds at 1% budget, T=0.01, N=10, SGD(lr=0.002, momentum=0.9,
// weight_decay=0.005) with batch size 32 and cosine annealing.
struct ALConfig {
  std::string strategy = "cec";
  int rounds = 6;
  double budget_fraction = 0.01;
  StrategyParams params;  // top_n=10, knn_k=10, alpha=0.1
  double temperature = 0.01;
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {0, 1, 2};

  // file-backed data; all three must be set together, labels required
  std::string train_embeddings;
  std::string test_embeddings;
  std::string class_head;
  std::string data_format = "binary";

  // synthetic fallback when no files are given
  int synth_classes = 10;
  int synth_dim = 32;
  int synth_train = 5000;
  int synth_test = 1000;
  std::vector<double> synth_class_weights;  // proportional; empty = uniform
  double synth_spread = 0.3;
  double synth_outlier_fraction = 0.0;
  std::uint64_t synth_seed = 42;

  std::string out_dir = "al-out";

  bool uses_files() const { return !train_embeddings.empty(); }
  void validate() const;
};

// Flat "key = value" file with '#' comments. Unknown keys are an error.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies key/value pairs onto cfg; values use the same spelling as the
// config file (lists comma-separated).
void apply_config(ALConfig& cfg, const std::map<std::string, std::string>& kv);

ALConfig load_config_file(const std::string& path);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace cec
