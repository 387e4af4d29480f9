#pragma once

#include <Eigen/Core>

#include <vector>

#include "calkit/dataset.hpp"
#include "calkit/groups.hpp"

namespace calkit {

enum class Signedness { Signed, Absolute };

// Signed calibration error of a group: the mean of prediction - label over
// its members. Lies in [-1, 1]. Throws on an empty ("degenerate") group.
double group_error(const Dataset& data, const Group& group);

// The uniform distribution over a group's indices. When the group is
// input-complete this realizes the group as a GroupDistribution with
// generalized_error equal to group_error.
GroupDistribution uniform_distribution(const Dataset& data, const Group& group);

// Generalized calibration error of a normalized distribution q:
// sum_i q(i) * (prediction_i - bayes_i), with bayes the empirical conditional
// label mean of the dataset. Throws if the weights are not normalized.
double generalized_error(const Dataset& data, const GroupDistribution& dist);

// Overload with a precomputed empirical_bayes vector (avoids re-deriving the
// level sets when evaluating many distributions over one dataset).
double generalized_error(const Dataset& data, const GroupDistribution& dist,
                         const Eigen::VectorXd& bayes);

// A finite weighted collection of group calibration errors: the random
// variable consumed by agglomeration functions. Weights are a probability
// vector; values are finite. Calibration errors lie in [-1,1] signed and
// [0,1] absolute, but the type does not restrict the range (axiom checks
// push arbitrary translates and scalings through it).
struct ErrorProfile {
  Eigen::VectorXd values;
  Eigen::VectorXd weights;
  Signedness signedness = Signedness::Signed;
};

// Validates lengths, finiteness and weight normalization.
ErrorProfile make_profile(Eigen::VectorXd values, Eigen::VectorXd weights,
                          Signedness signedness = Signedness::Signed);

// Per-member error evaluation of a grouping: one signed value per retained
// member, with the grouping measure renormalized over retained members.
// Members that are empty are dropped; dropping every member is an error
// ("vacuous grouping").
struct ProfileDetail {
  std::vector<int> member;        // indices into the grouping's member list
  Eigen::VectorXd signed_values;  // group_error / generalized_error per member
  Eigen::VectorXd weights;        // renormalized measure
};

ProfileDetail profile_detail(const Dataset& data, const Grouping& grouping);

// Assembles the error profile of a grouping; absolute value applied when
// requested.
ErrorProfile error_profile(const Dataset& data, const Grouping& grouping,
                           Signedness signedness);

}  // namespace calkit
