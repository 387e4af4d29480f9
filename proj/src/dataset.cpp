#include "calkit/dataset.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace calkit {

namespace {

// Bitwise key of a feature row. Exact identity: distinct bit patterns are
// distinct inputs.
std::string row_key(const Eigen::MatrixXd& features, Eigen::Index row) {
  std::string key(static_cast<std::size_t>(features.cols()) * sizeof(double), '\0');
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double v = features(row, j);
    std::memcpy(key.data() + static_cast<std::size_t>(j) * sizeof(double), &v,
                sizeof(double));
  }
  return key;
}

std::string value_key(double v) {
  std::string key(sizeof(double), '\0');
  std::memcpy(key.data(), &v, sizeof(double));
  return key;
}

std::vector<std::vector<int>> group_by_key(
    Eigen::Index n, const std::function<std::string(Eigen::Index)>& key_of) {
  std::unordered_map<std::string, int> ids;
  std::vector<std::vector<int>> sets;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, inserted] = ids.emplace(key_of(i), static_cast<int>(sets.size()));
    if (inserted) sets.emplace_back();
    sets[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(i));
  }
  return sets;
}

}  // namespace

Dataset make_dataset(Eigen::MatrixXd features, Eigen::VectorXd labels,
                     Eigen::VectorXd predictions,
                     std::vector<std::string> feature_names) {
  const Eigen::Index n = features.rows();
  if (n < 1) throw std::invalid_argument("dataset: needs at least one datapoint");
  if (labels.size() != n || predictions.size() != n)
    throw std::invalid_argument(
        "dataset: features, labels and predictions must have identical length");
  if (!feature_names.empty() &&
      static_cast<Eigen::Index>(feature_names.size()) != features.cols())
    throw std::invalid_argument("dataset: feature_names must be empty or one per column");

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j)
      if (!std::isfinite(features(i, j)))
        throw std::invalid_argument("dataset: non-finite feature at row " +
                                    std::to_string(i + 1));
    if (labels[i] != 0.0 && labels[i] != 1.0)
      throw std::invalid_argument("dataset: label must be 0 or 1 at row " +
                                  std::to_string(i + 1));
    if (!std::isfinite(predictions[i]) || predictions[i] < 0.0 || predictions[i] > 1.0)
      throw std::invalid_argument("dataset: prediction outside [0,1] at row " +
                                  std::to_string(i + 1));
  }

  // The predictor is a function of the input: duplicate inputs must carry
  // identical predictions. Rejected, not clamped.
  std::unordered_map<std::string, Eigen::Index> first_seen;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, inserted] = first_seen.emplace(row_key(features, i), i);
    if (!inserted && predictions[it->second] != predictions[i])
      throw std::invalid_argument(
          "dataset: rows " + std::to_string(it->second + 1) + " and " +
          std::to_string(i + 1) +
          " share a feature vector but carry different predictions");
  }

  Dataset data;
  data.features = std::move(features);
  data.labels = std::move(labels);
  data.predictions = std::move(predictions);
  data.feature_names = std::move(feature_names);
  return data;
}

std::vector<std::vector<int>> level_sets(const Dataset& data, LevelKey key) {
  if (key == LevelKey::Inputs)
    return group_by_key(data.size(),
                        [&](Eigen::Index i) { return row_key(data.features, i); });
  return group_by_key(data.size(),
                      [&](Eigen::Index i) { return value_key(data.predictions[i]); });
}

Eigen::VectorXd empirical_bayes(const Dataset& data) {
  Eigen::VectorXd bayes(data.size());
  for (const auto& set : level_sets(data, LevelKey::Inputs)) {
    double sum = 0.0;
    for (int i : set) sum += data.labels[i];
    const double mean = sum / static_cast<double>(set.size());
    for (int i : set) bayes[i] = mean;
  }
  return bayes;
}

std::uint64_t content_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* ptr, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(ptr);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t shape[2] = {data.size(), data.dim()};
  mix_bytes(shape, sizeof(shape));
  mix_bytes(data.features.data(),
            static_cast<std::size_t>(data.features.size()) * sizeof(double));
  mix_bytes(data.labels.data(),
            static_cast<std::size_t>(data.labels.size()) * sizeof(double));
  mix_bytes(data.predictions.data(),
            static_cast<std::size_t>(data.predictions.size()) * sizeof(double));
  return h;
}

}  // namespace calkit
