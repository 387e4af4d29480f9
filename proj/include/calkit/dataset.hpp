#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace calkit {

// Evaluation dataset: feature rows, binary labels, and the predictor output
// for every datapoint. Immutable after construction; all operations in this
// library are pure functions over it.
//
// Invariants (enforced by make_dataset):
//   - features, labels and predictions all have N >= 1 rows;
//   - every label is exactly 0 or 1, every prediction lies in [0, 1];
//   - rows with bitwise-identical feature vectors carry identical predictions
//     (the predictor is a function of the input).
struct Dataset {
  Eigen::MatrixXd features;     // N x d
  Eigen::VectorXd labels;       // entries in {0, 1}
  Eigen::VectorXd predictions;  // entries in [0, 1]
  std::vector<std::string> feature_names;  // empty, or one name per column

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

// Validates all Dataset invariants and assembles the value.
// Throws std::invalid_argument with a row-numbered message on violation.
Dataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXd labels,
                     Eigen::VectorXd predictions,
                     std::vector<std::string> feature_names = {});

// Key for exact level sets. Input identity is bitwise equality of the whole
// feature row; tolerance-based identity would silently merge distinct inputs.
enum class LevelKey { Inputs, Predictions };

// Indices partitioned into exact level sets of the chosen key, ordered by
// first occurrence. Every index appears in exactly one set.
std::vector<std::vector<int>> level_sets(const Dataset& data, LevelKey key);

// Per-row empirical conditional label mean: the mean label over all rows that
// share the row's exact feature vector. Rows with identical inputs share the
// value; values lie in [0, 1].
Eigen::VectorXd empirical_bayes(const Dataset& data);

// FNV-1a over the raw bytes of features, labels and predictions plus the
// shape. Used as the dataset fingerprint in reports.
std::uint64_t content_hash(const Dataset& data);

}  // namespace calkit
