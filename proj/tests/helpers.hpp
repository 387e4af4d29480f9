#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "calkit/dataset.hpp"
#include "calkit/errors.hpp"
#include "calkit/groups.hpp"
#include "calkit/rng.hpp"

namespace testutil {

using namespace calkit;

// predictions [0.2, 0.4, 0.6, 0.8], labels [0, 1, 1, 1]: per-point errors
// 0.2, -0.6, -0.4, -0.2.
inline Dataset four_point_fixture() {
  Eigen::MatrixXd features(4, 1);
  features << 0.0, 1.0, 2.0, 3.0;
  Eigen::VectorXd labels(4);
  labels << 0.0, 1.0, 1.0, 1.0;
  Eigen::VectorXd predictions(4);
  predictions << 0.2, 0.4, 0.6, 0.8;
  return make_dataset(features, labels, predictions);
}

// Random dataset. Duplicated rows copy features and prediction (labels stay
// independent). Dyadic predictions (multiples of 1/256) make arithmetic
// identities exact.
inline Dataset random_dataset(Rng& rng, int n, int d, bool with_duplicates = false,
                              bool dyadic = false) {
  Eigen::MatrixXd features(n, d);
  Eigen::VectorXd labels(n), predictions(n);
  for (int i = 0; i < n; ++i) {
    if (with_duplicates && i > 0 && rng.bernoulli(0.3)) {
      const int src = rng.uniform_int(0, i - 1);
      features.row(i) = features.row(src);
      predictions[i] = predictions[src];
    } else {
      for (int j = 0; j < d; ++j) features(i, j) = rng.uniform(-1.0, 1.0);
      predictions[i] =
          dyadic ? static_cast<double>(rng.uniform_int(0, 256)) / 256.0 : rng.uniform();
    }
    labels[i] = rng.bernoulli(rng.uniform()) ? 1.0 : 0.0;
  }
  return make_dataset(features, labels, predictions);
}

// Nonempty union of input level sets: input-complete by construction.
inline Group random_input_complete_group(Rng& rng, const Dataset& data) {
  const auto sets = level_sets(data, LevelKey::Inputs);
  Group group;
  while (group.indices.empty()) {
    for (const auto& set : sets)
      if (rng.bernoulli(0.4))
        group.indices.insert(group.indices.end(), set.begin(), set.end());
  }
  std::sort(group.indices.begin(), group.indices.end());
  return group;
}

// Arbitrary nonempty subset of [0, N).
inline Group random_group(Rng& rng, int n) {
  Group group;
  while (group.indices.empty()) {
    for (int i = 0; i < n; ++i)
      if (rng.bernoulli(0.35)) group.indices.push_back(i);
  }
  return group;
}

}  // namespace testutil
