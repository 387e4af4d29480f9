#include "calkit/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace calkit {

double group_error(const Dataset& data, const Group& group) {
  if (group.indices.empty())
    throw std::invalid_argument("group_error: degenerate group (empty)");
  double sum = 0.0;
  for (int i : group.indices) {
    if (i < 0 || i >= data.size())
      throw std::invalid_argument("group_error: index " + std::to_string(i) +
                                  " outside the dataset");
    sum += data.predictions[i] - data.labels[i];
  }
  return sum / static_cast<double>(group.indices.size());
}

GroupDistribution uniform_distribution(const Dataset& data, const Group& group) {
  if (group.indices.empty())
    throw std::invalid_argument("uniform_distribution: degenerate group (empty)");
  GroupDistribution dist;
  dist.indices = group.indices;
  dist.weights = Eigen::VectorXd::Constant(
      static_cast<Eigen::Index>(group.indices.size()),
      1.0 / static_cast<double>(group.indices.size()));
  dist.anchor = group.anchor;
  dist.label = group.label;
  (void)data;
  return dist;
}

double generalized_error(const Dataset& data, const GroupDistribution& dist) {
  return generalized_error(data, dist, empirical_bayes(data));
}

double generalized_error(const Dataset& data, const GroupDistribution& dist,
                         const Eigen::VectorXd& bayes) {
  if (dist.indices.empty())
    throw std::invalid_argument("generalized_error: empty distribution support");
  if (dist.weights.size() != static_cast<Eigen::Index>(dist.indices.size()))
    throw std::invalid_argument("generalized_error: weights misaligned with support");
  double sum = 0.0, total = 0.0;
  for (std::size_t s = 0; s < dist.indices.size(); ++s) {
    const int i = dist.indices[s];
    if (i < 0 || i >= data.size())
      throw std::invalid_argument("generalized_error: index outside the dataset");
    const double w = dist.weights[static_cast<Eigen::Index>(s)];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("generalized_error: weights must be nonnegative");
    sum += w * (data.predictions[i] - bayes[i]);
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw std::invalid_argument("generalized_error: weights not normalized (sum " +
                                std::to_string(total) + ")");
  return sum;
}

ErrorProfile make_profile(Eigen::VectorXd values, Eigen::VectorXd weights,
                          Signedness signedness) {
  if (values.size() == 0 || values.size() != weights.size())
    throw std::invalid_argument("profile: values and weights must be nonempty and aligned");
  for (Eigen::Index j = 0; j < values.size(); ++j)
    if (!std::isfinite(values[j]))
      throw std::invalid_argument("profile: values must be finite");
  double total = 0.0;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j]))
      throw std::invalid_argument("profile: weights must be finite and nonnegative");
    total += weights[j];
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw std::invalid_argument("profile: weights sum to " + std::to_string(total) +
                                ", expected 1");
  ErrorProfile profile;
  profile.values = std::move(values);
  profile.weights = std::move(weights);
  profile.signedness = signedness;
  return profile;
}

ProfileDetail profile_detail(const Dataset& data, const Grouping& grouping) {
  validate(grouping, data);
  const Eigen::VectorXd measure = member_weights(grouping);
  const auto m = static_cast<Eigen::Index>(grouping.member_count());

  Eigen::VectorXd bayes;
  if (grouping.kind == GroupingKind::Weighted) bayes = empirical_bayes(data);

  ProfileDetail detail;
  std::vector<double> values, weights;
  for (Eigen::Index j = 0; j < m; ++j) {
    // validate() guarantees nonempty members for well-formed groupings; the
    // drop path covers groupings assembled by hand.
    if (grouping.kind == GroupingKind::Weighted) {
      const auto& dist = grouping.members[static_cast<std::size_t>(j)];
      if (dist.indices.empty()) continue;
      values.push_back(generalized_error(data, dist, bayes));
    } else {
      const auto& group = grouping.groups[static_cast<std::size_t>(j)];
      if (group.indices.empty()) continue;
      values.push_back(group_error(data, group));
    }
    weights.push_back(measure[j]);
    detail.member.push_back(static_cast<int>(j));
  }
  if (values.empty()) throw std::invalid_argument("error_profile: vacuous grouping");

  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) throw std::invalid_argument("error_profile: vacuous grouping");

  detail.signed_values =
      Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  detail.weights =
      Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size())) /
      total;
  return detail;
}

ErrorProfile error_profile(const Dataset& data, const Grouping& grouping,
                           Signedness signedness) {
  ProfileDetail detail = profile_detail(data, grouping);
  Eigen::VectorXd values = signedness == Signedness::Absolute
                               ? detail.signed_values.cwiseAbs().eval()
                               : detail.signed_values;
  return make_profile(std::move(values), std::move(detail.weights), signedness);
}

}  // namespace calkit
