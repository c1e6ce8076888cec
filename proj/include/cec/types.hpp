#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

// Malformed or out-of-contract data: bad magic, dimension mismatch,
// non-finite entries, labels out of range. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: unknown keys, unparsable values, inconsistent
// option combinations. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Snaps a value onto the float32 grid. Pool files store float32, so every
// matrix that enters the system through a loader or the generator is kept
// exactly representable; binary round-trips are then bit-exact.
inline double quantize_f32(double x) { return static_cast<double>(static_cast<float>(x)); }

// Pool of sample embeddings. Labels are optional and consulted only by the
// oracle and the evaluator; ids are stable 0..n-1 row identifiers.
struct EmbeddingPool {
  Matrix vectors;                          // n x d
  std::optional<std::vector<int>> labels;  // class ids in [0, num_classes)
  std::vector<int> ids;                    // 0..n-1
  std::optional<int> num_classes;

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
  void validate() const;
};

EmbeddingPool make_pool(Matrix vectors, std::optional<std::vector<int>> labels = std::nullopt,
                        std::optional<int> num_classes = std::nullopt);

// New pool from the given rows, re-identified 0..m-1.
EmbeddingPool subset_pool(const EmbeddingPool& pool, const std::vector<int>& rows);

// Class-embedding matrix (zero-shot anchors or learned prototypes) plus the
// softmax temperature.
struct ClassHead {
  Matrix class_embeddings;  // K x d
  double temperature = 0.01;

  Eigen::Index num_classes() const { return class_embeddings.rows(); }
  Eigen::Index dim() const { return class_embeddings.cols(); }
  void validate() const;
};

struct SyntheticSpec {
  int num_classes = 10;
  int dim = 32;
  int pool_size = 1000;
  std::vector<double> class_weights;  // size K, nonnegative, sums to 1
  double cluster_spread = 0.3;
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Normalizes class weights that are given proportionally (e.g. "10,10,5,1").
std::vector<double> normalize_weights(std::vector<double> weights);

}  // namespace cec
