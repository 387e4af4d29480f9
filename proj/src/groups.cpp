#include "calkit/groups.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace calkit {

namespace {

void check_indices(const std::vector<int>& indices, int universe,
                   const std::string& what) {
  int prev = -1;
  for (int i : indices) {
    if (i < 0 || i >= universe)
      throw std::invalid_argument(what + ": index " + std::to_string(i) +
                                  " outside [0, " + std::to_string(universe) + ")");
    if (i <= prev)
      throw std::invalid_argument(what + ": indices must be sorted and distinct");
    prev = i;
  }
}

void check_probability_vector(const Eigen::VectorXd& w, const std::string& what) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
      throw std::invalid_argument(what + ": weights must be finite and nonnegative");
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > kWeightTolerance)
    throw std::invalid_argument(what + ": weights sum to " + std::to_string(sum) +
                                ", expected 1");
}

}  // namespace

Eigen::VectorXd member_weights(const Grouping& grouping) {
  const auto m = static_cast<Eigen::Index>(grouping.member_count());
  if (m == 0) throw std::invalid_argument("grouping: no members");
  switch (grouping.measure) {
    case MeasureKind::Uniform:
      return Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    case MeasureKind::Empirical: {
      if (grouping.kind == GroupingKind::Weighted)
        // One distribution per anchor datapoint: the empirical measure over
        // anchors is uniform over members.
        return Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
      Eigen::VectorXd w(m);
      double total = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        w[j] = static_cast<double>(grouping.groups[j].indices.size());
        total += w[j];
      }
      return w / total;
    }
    case MeasureKind::Explicit: {
      if (grouping.explicit_weights.size() != m)
        throw std::invalid_argument("grouping: explicit weights must match member count");
      check_probability_vector(grouping.explicit_weights, "grouping measure");
      return grouping.explicit_weights;
    }
  }
  throw std::invalid_argument("grouping: unknown measure");
}

void validate(const Grouping& grouping, const Dataset& data) {
  const int n = static_cast<int>(data.size());
  if (grouping.universe != n)
    throw std::invalid_argument("grouping: universe size " +
                                std::to_string(grouping.universe) +
                                " does not match dataset size " + std::to_string(n));
  if (grouping.member_count() == 0)
    throw std::invalid_argument("grouping: no members");

  // Empty members are tolerated here; error-profile assembly drops them.
  if (grouping.kind == GroupingKind::Weighted) {
    if (!grouping.groups.empty())
      throw std::invalid_argument("grouping: weighted kind carries distributions only");
    for (const auto& dist : grouping.members) {
      if (dist.indices.empty()) continue;
      check_indices(dist.indices, n, "distribution");
      if (dist.weights.size() != static_cast<Eigen::Index>(dist.indices.size()))
        throw std::invalid_argument("distribution: weights misaligned with support");
      check_probability_vector(dist.weights, "distribution");
    }
  } else {
    if (!grouping.members.empty())
      throw std::invalid_argument("grouping: group kinds carry index groups only");
    for (const auto& group : grouping.groups) check_indices(group.indices, n, "group");
    if (grouping.kind == GroupingKind::Partition) {
      std::vector<char> seen(static_cast<std::size_t>(n), 0);
      std::size_t covered = 0;
      for (const auto& group : grouping.groups)
        for (int i : group.indices) {
          if (seen[static_cast<std::size_t>(i)])
            throw std::invalid_argument("partition: members are not pairwise disjoint");
          seen[static_cast<std::size_t>(i)] = 1;
          ++covered;
        }
      if (covered != static_cast<std::size_t>(n))
        throw std::invalid_argument("partition: members do not cover the index set");
    }
  }
  if (grouping.measure == MeasureKind::Explicit) member_weights(grouping);
}

void validate_distribution(const GroupDistribution& dist, const Dataset& data) {
  if (dist.indices.empty())
    throw std::invalid_argument("distribution: empty support");
  check_indices(dist.indices, static_cast<int>(data.size()), "distribution");
  if (dist.weights.size() != static_cast<Eigen::Index>(dist.indices.size()))
    throw std::invalid_argument("distribution: weights misaligned with support");
  check_probability_vector(dist.weights, "distribution");

  // Weight must be a function of the feature vector: rows sharing an input
  // either all appear with equal weight, or none appear.
  std::vector<double> weight_of(static_cast<std::size_t>(data.size()), 0.0);
  std::vector<char> in_support(static_cast<std::size_t>(data.size()), 0);
  for (std::size_t s = 0; s < dist.indices.size(); ++s) {
    weight_of[static_cast<std::size_t>(dist.indices[s])] = dist.weights[static_cast<Eigen::Index>(s)];
    in_support[static_cast<std::size_t>(dist.indices[s])] = 1;
  }
  for (const auto& set : level_sets(data, LevelKey::Inputs)) {
    for (std::size_t t = 1; t < set.size(); ++t) {
      const auto a = static_cast<std::size_t>(set[0]);
      const auto b = static_cast<std::size_t>(set[t]);
      if (in_support[a] != in_support[b] || weight_of[a] != weight_of[b])
        throw std::invalid_argument(
            "distribution: weight is not a function of the input (rows " +
            std::to_string(set[0] + 1) + " and " + std::to_string(set[t] + 1) + ")");
    }
  }
}

bool is_input_complete(const Grouping& grouping, const Dataset& data) {
  const auto sets = level_sets(data, LevelKey::Inputs);
  std::vector<int> set_of(static_cast<std::size_t>(data.size()), 0);
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (int i : sets[s]) set_of[static_cast<std::size_t>(i)] = static_cast<int>(s);

  auto covers_whole_sets = [&](const std::vector<int>& indices) {
    std::unordered_set<int> inside(indices.begin(), indices.end());
    std::unordered_set<int> touched;
    for (int i : indices) touched.insert(set_of[static_cast<std::size_t>(i)]);
    for (int s : touched)
      for (int i : sets[static_cast<std::size_t>(s)])
        if (!inside.count(i)) return false;
    return true;
  };

  if (grouping.kind == GroupingKind::Weighted) {
    for (const auto& dist : grouping.members)
      if (!covers_whole_sets(dist.indices)) return false;
    return true;
  }
  for (const auto& group : grouping.groups)
    if (!covers_whole_sets(group.indices)) return false;
  return true;
}

}  // namespace calkit
