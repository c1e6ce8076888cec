#pragma once

#include "cec/config.hpp"
#include "cec/types.hpp"

#include <string>
#include <vector>

namespace cec {

// Train/test pools (row-normalized, labeled) plus the zero-shot head.
struct Dataset {
  EmbeddingPool train;
  EmbeddingPool test;
  ClassHead head;
};

// Loads the configured files or synthesizes a pool; synthetic train/test are
// drawn jointly from the same anchors and split disjointly.
Dataset load_dataset(const ALConfig& cfg);

struct RoundRecord {
  int round = 0;                    // 1-based
  std::vector<int> selected;        // ids queried this round
  double accuracy = 0.0;            // test accuracy after retraining
  int coverage = 0;                 // distinct classes in the labeled set
  double mean_score = 0.0;          // mean strategy score of the selections
  bool has_score = false;
  int budget = 0;                   // actual batch size this round
  bool truncated = false;           // pool ran out before the nominal budget
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
};

struct ExperimentReport {
  std::string strategy;
  int nominal_budget = 0;  // ceil(budget_fraction * n_train)
  double zero_shot_accuracy = 0.0;
  std::vector<SeedRun> runs;

  double mean_accuracy(int round) const;  // across seeds, 1-based round
  double std_accuracy(int round) const;   // population std
  double mean_coverage(int round) const;
};

// Runs the full multi-round protocol for every seed on the given dataset.
ExperimentReport run_experiment(const ALConfig& cfg, const Dataset& data);

// Convenience: load data, run, and write rounds.csv + summary.json to
// cfg.out_dir.
ExperimentReport run_experiment(const ALConfig& cfg);

// Accuracy of the untrained zero-shot head on the test split.
double zero_shot_report(const ALConfig& cfg);

struct ComparisonReport {
  std::vector<ExperimentReport> per_strategy;
};

// Runs each strategy on identical data and seeds.
ComparisonReport compare_strategies(const ALConfig& cfg, const std::vector<std::string>& strategies);
ComparisonReport compare_strategies(const ALConfig& cfg, const std::vector<std::string>& strategies,
                                    const Dataset& data);

// Report writers; all output is byte-deterministic for a fixed config.
void write_rounds_csv(const ExperimentReport& report, const std::string& path);
std::string summary_json(const ALConfig& cfg, const ExperimentReport& report);
void write_summary_json(const ALConfig& cfg, const ExperimentReport& report, const std::string& path);
void write_comparison_csv(const ComparisonReport& comparison, const std::string& path);
std::string comparison_json(const ALConfig& cfg, const ComparisonReport& comparison);
void write_comparison_json(const ALConfig& cfg, const ComparisonReport& comparison, const std::string& path);

std::uint64_t round_seed(std::uint64_t run_seed, int round);
std::uint64_t train_seed(std::uint64_t run_seed, int round);

}  // namespace cec
