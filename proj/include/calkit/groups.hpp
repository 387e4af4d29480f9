#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "calkit/dataset.hpp"

namespace calkit {

// Absolute tolerance for probability vectors (distribution weights, grouping
// measures) summing to one.
inline constexpr double kWeightTolerance = 1e-9;

// A nonempty set of datapoint indices. `anchor` is set for groups built
// around a single datapoint (k-NN), -1 otherwise.
struct Group {
  std::vector<int> indices;  // sorted, distinct, nonempty
  int anchor = -1;
  std::string label;
};

// A normalized weight distribution over datapoints, generalizing a Group.
// Only strictly positive weights are stored; `indices` is the support.
//
// Invariants: weights sum to 1 within kWeightTolerance, and the weight is a
// function of the feature vector (rows with identical inputs carry identical
// weights). Constructors in grouping.hpp guarantee the latter; use
// validate_distribution for hand-built values.
struct GroupDistribution {
  std::vector<int> indices;  // support, sorted, nonempty
  Eigen::VectorXd weights;   // positive, aligned with indices
  int anchor = -1;
  std::string label;
};

enum class GroupingKind { Partition, Overlapping, Weighted };

// Weighting of the grouping members themselves (the measure on the member
// index set). Empirical means group-size-proportional; for weighted
// groupings, whose members are one distribution per anchor datapoint, it
// coincides with the uniform measure over anchors.
enum class MeasureKind { Uniform, Empirical, Explicit };

// Structured record of how a grouping was built, carried through to reports.
struct Provenance {
  std::string constructor;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> notes;  // warnings: collapsed dims, dropped bins, ...
};

// A family of groups or group distributions over one dataset, together with
// a measure over its members.
struct Grouping {
  GroupingKind kind = GroupingKind::Partition;
  int universe = 0;  // N of the owning dataset
  std::vector<Group> groups;                 // Partition / Overlapping
  std::vector<GroupDistribution> members;    // Weighted
  MeasureKind measure = MeasureKind::Empirical;
  Eigen::VectorXd explicit_weights;          // used when measure == Explicit
  Provenance provenance;

  std::size_t member_count() const {
    return kind == GroupingKind::Weighted ? members.size() : groups.size();
  }
};

// Resolves the measure into one weight per member (sums to 1).
Eigen::VectorXd member_weights(const Grouping& grouping);

// Structural validation: index ranges, distinctness, partition disjointness
// and coverage, measure weights. Throws std::invalid_argument on violation.
void validate(const Grouping& grouping, const Dataset& data);

// Validates a single distribution against a dataset: support validity,
// normalization, and weight-is-a-function-of-the-input.
void validate_distribution(const GroupDistribution& dist, const Dataset& data);

// True iff every member of the grouping contains all or none of the
// datapoints sharing any given feature vector.
bool is_input_complete(const Grouping& grouping, const Dataset& data);

}  // namespace calkit
