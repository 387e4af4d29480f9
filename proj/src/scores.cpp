#include "calkit/scores.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace calkit {

ScoreReport global_score(const Dataset& data, const Grouping& grouping,
                         Signedness signedness, const Agglomerator& agg,
                         std::string name) {
  const ProfileDetail detail = profile_detail(data, grouping);
  Eigen::VectorXd values = signedness == Signedness::Absolute
                               ? detail.signed_values.cwiseAbs().eval()
                               : detail.signed_values;
  const ErrorProfile profile = make_profile(values, detail.weights, signedness);

  ScoreReport report;
  report.name = std::move(name);
  report.value = apply(agg, profile);
  report.signedness = signedness;
  report.measure = grouping.measure;
  report.agglomerator = agg.describe();
  report.grouping = grouping.provenance;
  report.dataset_size = data.size();
  report.dataset_dim = data.dim();
  report.dataset_hash = content_hash(data);

  report.per_group.reserve(detail.member.size());
  for (std::size_t r = 0; r < detail.member.size(); ++r) {
    const int m = detail.member[r];
    GroupRow row;
    if (grouping.kind == GroupingKind::Weighted) {
      const auto& dist = grouping.members[static_cast<std::size_t>(m)];
      row.id = dist.label.empty() ? "member " + std::to_string(m) : dist.label;
      row.size = static_cast<int>(dist.indices.size());
    } else {
      const auto& group = grouping.groups[static_cast<std::size_t>(m)];
      row.id = group.label.empty() ? "member " + std::to_string(m) : group.label;
      row.size = static_cast<int>(group.indices.size());
    }
    row.weight = detail.weights[static_cast<Eigen::Index>(r)];
    row.signed_error = detail.signed_values[static_cast<Eigen::Index>(r)];
    row.abs_error = std::abs(row.signed_error);
    report.per_group.push_back(std::move(row));
  }
  return report;
}

ScoreReport ece(const Dataset& data, const BinningScheme& scheme) {
  Grouping grouping = prediction_bins(data, scheme);
  grouping.measure = MeasureKind::Empirical;
  return global_score(data, grouping, Signedness::Absolute, Agglomerator::mean(), "ece");
}

ScoreReport ace(const Dataset& data, const BinningScheme& scheme) {
  Grouping grouping = prediction_bins(data, scheme);
  grouping.measure = MeasureKind::Uniform;  // each nonempty bin weighted equally
  return global_score(data, grouping, Signedness::Absolute, Agglomerator::mean(), "ace");
}

ScoreReport mce(const Dataset& data, const BinningScheme& scheme) {
  Grouping grouping = prediction_bins(data, scheme);
  grouping.measure = MeasureKind::Uniform;
  return global_score(data, grouping, Signedness::Absolute, Agglomerator::max(), "mce");
}

double brier(const Dataset& data) {
  return (data.predictions - data.labels).squaredNorm() /
         static_cast<double>(data.size());
}

BrierDecomposition brier_decomposition(const Dataset& data, LevelKey by) {
  const double n = static_cast<double>(data.size());
  BrierDecomposition out;
  for (const auto& set : level_sets(data, by)) {
    const double weight = static_cast<double>(set.size()) / n;
    double label_sum = 0.0, pred_sum = 0.0;
    for (int i : set) {
      label_sum += data.labels[i];
      pred_sum += data.predictions[i];
    }
    const double pbar = label_sum / static_cast<double>(set.size());
    const double vhat = pred_sum / static_cast<double>(set.size());
    // Within a level set the key is constant, so vhat is the common
    // prediction (by = predictions, or by = inputs via the Dataset invariant)
    // and vhat - pbar is the group's signed error.
    out.calibration += weight * (vhat - pbar) * (vhat - pbar);
    out.refinement += weight * pbar * (1.0 - pbar);
  }
  return out;
}

std::vector<std::pair<int, double>> local_errors(const Dataset& data,
                                                 const Grouping& grouping) {
  if (grouping.kind == GroupingKind::Partition)
    throw std::invalid_argument(
        "local_errors: needs an overlapping or weighted per-anchor grouping");
  validate(grouping, data);

  std::vector<std::pair<int, double>> out;
  if (grouping.kind == GroupingKind::Weighted) {
    const Eigen::VectorXd bayes = empirical_bayes(data);
    for (const auto& dist : grouping.members) {
      if (dist.anchor < 0)
        throw std::invalid_argument("local_errors: member without an anchor");
      out.emplace_back(dist.anchor, generalized_error(data, dist, bayes));
    }
  } else {
    for (const auto& group : grouping.groups) {
      if (group.anchor < 0)
        throw std::invalid_argument("local_errors: member without an anchor");
      out.emplace_back(group.anchor, group_error(data, group));
    }
  }
  return out;
}

ScoreReport mlce(const Dataset& data, const KernelSpec& spec,
                 const BinningScheme& scheme, bool absolute) {
  Grouping grouping = mlce_groups(data, spec, scheme);
  grouping.provenance.notes.push_back(absolute ? "maximum of absolute local errors"
                                               : "signed maximum of local errors");
  return global_score(data, grouping,
                      absolute ? Signedness::Absolute : Signedness::Signed,
                      Agglomerator::max(), "mlce");
}

}  // namespace calkit
