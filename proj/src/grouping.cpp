#include "calkit/grouping.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace calkit {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string fmt(int v) { return std::to_string(v); }

void check_scheme(const BinningScheme& scheme) {
  if (scheme.count < 1)
    throw std::invalid_argument("binning: count must be >= 1");
}

// Bin edges over [0,1] for a prediction-space scheme. Intervals are
// half-open [l, u) with the final bin closed.
std::vector<double> prediction_edges(const Dataset& data, const BinningScheme& scheme) {
  check_scheme(scheme);
  const int k = scheme.count;
  std::vector<double> edges(static_cast<std::size_t>(k) + 1);
  if (scheme.mode == BinMode::EqualWidth) {
    for (int j = 0; j <= k; ++j)
      edges[static_cast<std::size_t>(j)] = static_cast<double>(j) / static_cast<double>(k);
  } else {
    const auto n = data.size();
    if (n < k)
      throw std::invalid_argument("binning: equal-frequency needs N >= count (N = " +
                                  std::to_string(n) + ", count = " + std::to_string(k) + ")");
    std::vector<double> sorted(data.predictions.data(), data.predictions.data() + n);
    std::sort(sorted.begin(), sorted.end());
    edges.front() = 0.0;
    edges.back() = 1.0;
    for (int j = 1; j < k; ++j)
      edges[static_cast<std::size_t>(j)] =
          sorted[static_cast<std::size_t>((static_cast<long long>(j) * n) / k)];
  }
  edges.front() = 0.0;
  edges.back() = 1.0;
  return edges;
}

// Largest j with edges[j] <= v, clamped into [0, bins-1]; exact interval
// semantics, ties go to the upper bin.
int bin_of(double v, const std::vector<double>& edges) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  const auto j = static_cast<long>(it - edges.begin()) - 1;
  const auto bins = static_cast<long>(edges.size()) - 2;
  return static_cast<int>(std::clamp(j, 0L, bins));
}

Group make_group(std::vector<int> indices, std::string label, int anchor = -1) {
  Group g;
  g.indices = std::move(indices);
  g.label = std::move(label);
  g.anchor = anchor;
  return g;
}

}  // namespace

double kernel_value(KernelShape shape, double t) {
  switch (shape) {
    case KernelShape::Gaussian:
      return std::exp(-0.5 * t * t);
    case KernelShape::Epanechnikov:
      return t < 1.0 ? 1.0 - t * t : 0.0;
    case KernelShape::Boxcar:
      return t <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

Eigen::VectorXd metric_divisors(const Eigen::MatrixXd& features, const MetricSpec& metric) {
  const Eigen::Index d = features.cols();
  Eigen::VectorXd div = Eigen::VectorXd::Ones(d);
  if (metric.scaling == ScalingKind::None) return div;
  for (Eigen::Index j = 0; j < d; ++j) {
    double s;
    if (metric.scaling == ScalingKind::Range) {
      s = features.col(j).maxCoeff() - features.col(j).minCoeff();
    } else {
      const double mean = features.col(j).mean();
      s = std::sqrt((features.col(j).array() - mean).square().mean());
    }
    div[j] = s > 0.0 ? s : 1.0;  // constant features get divisor 1
  }
  return div;
}

double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& divisors, NormKind norm) {
  const Eigen::ArrayXd diff = (a - b).array() / divisors.array();
  switch (norm) {
    case NormKind::L1:
      return diff.abs().sum();
    case NormKind::L2:
      return std::sqrt(diff.square().sum());
    case NormKind::LInf:
      return diff.abs().maxCoeff();
  }
  return 0.0;
}

Grouping prediction_bins(const Dataset& data, const BinningScheme& scheme) {
  if (scheme.space != BinSpace::Predictions)
    throw std::invalid_argument("prediction_bins: scheme must be over predictions");
  const auto edges = prediction_edges(data, scheme);

  std::vector<std::vector<int>> cells(static_cast<std::size_t>(scheme.count));
  for (Eigen::Index i = 0; i < data.size(); ++i)
    cells[static_cast<std::size_t>(bin_of(data.predictions[i], edges))].push_back(
        static_cast<int>(i));

  Grouping grouping;
  grouping.kind = GroupingKind::Partition;
  grouping.universe = static_cast<int>(data.size());
  grouping.measure = MeasureKind::Empirical;
  grouping.provenance.constructor = "prediction_bins";
  grouping.provenance.params = {
      {"count", fmt(scheme.count)},
      {"mode", scheme.mode == BinMode::EqualWidth ? "equal_width" : "equal_frequency"}};
  int dropped = 0;
  for (int j = 0; j < scheme.count; ++j) {
    auto& cell = cells[static_cast<std::size_t>(j)];
    if (cell.empty()) {
      ++dropped;
      continue;
    }
    const bool last = j + 1 == scheme.count;
    grouping.groups.push_back(make_group(
        std::move(cell), "[" + fmt(edges[static_cast<std::size_t>(j)]) + "," +
                             fmt(edges[static_cast<std::size_t>(j) + 1]) +
                             (last ? "]" : ")")));
  }
  if (dropped > 0)
    grouping.provenance.notes.push_back(std::to_string(dropped) + " empty bin(s) dropped");
  return grouping;
}

Grouping feature_grid(const Dataset& data, const std::vector<int>& bins_per_dim) {
  const Eigen::Index d = data.dim();
  if (static_cast<Eigen::Index>(bins_per_dim.size()) != d)
    throw std::invalid_argument("feature_grid: bins_per_dim must have one entry per feature");
  for (int b : bins_per_dim)
    if (b < 1) throw std::invalid_argument("feature_grid: bins must be >= 1");

  Grouping grouping;
  grouping.kind = GroupingKind::Partition;
  grouping.universe = static_cast<int>(data.size());
  grouping.measure = MeasureKind::Empirical;
  grouping.provenance.constructor = "feature_grid";

  std::vector<int> bins(bins_per_dim);
  std::vector<std::vector<double>> edges(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = data.features.col(j).minCoeff();
    const double hi = data.features.col(j).maxCoeff();
    auto& b = bins[static_cast<std::size_t>(j)];
    if (hi == lo && b > 1) {
      grouping.provenance.notes.push_back("feature " + std::to_string(j) +
                                          " is constant; collapsed to 1 bin");
      b = 1;
    }
    auto& e = edges[static_cast<std::size_t>(j)];
    e.resize(static_cast<std::size_t>(b) + 1);
    for (int t = 0; t <= b; ++t)
      e[static_cast<std::size_t>(t)] =
          lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(b);
    e.back() = hi;
  }
  std::string bins_desc;
  for (std::size_t j = 0; j < bins.size(); ++j)
    bins_desc += (j ? "," : "") + std::to_string(bins[j]);
  grouping.provenance.params = {{"bins_per_dim", bins_desc}};

  // Row-major flat cell index, cells ordered lexicographically by multi-index.
  std::vector<long> strides(static_cast<std::size_t>(d), 1);
  for (Eigen::Index j = d - 2; j >= 0; --j)
    strides[static_cast<std::size_t>(j)] =
        strides[static_cast<std::size_t>(j) + 1] * bins[static_cast<std::size_t>(j) + 1];

  std::vector<long> flat(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    long cell = 0;
    for (Eigen::Index j = 0; j < d; ++j)
      cell += strides[static_cast<std::size_t>(j)] *
              bin_of(data.features(i, j), edges[static_cast<std::size_t>(j)]);
    flat[static_cast<std::size_t>(i)] = cell;
  }

  std::vector<long> occupied(flat);
  std::sort(occupied.begin(), occupied.end());
  occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());

  for (long cell : occupied) {
    std::vector<int> indices;
    for (Eigen::Index i = 0; i < data.size(); ++i)
      if (flat[static_cast<std::size_t>(i)] == cell) indices.push_back(static_cast<int>(i));
    std::string label = "cell(";
    long rest = cell;
    for (Eigen::Index j = 0; j < d; ++j) {
      const long idx = rest / strides[static_cast<std::size_t>(j)];
      rest %= strides[static_cast<std::size_t>(j)];
      label += (j ? "," : "") + std::to_string(idx);
    }
    label += ")";
    grouping.groups.push_back(make_group(std::move(indices), std::move(label)));
  }
  return grouping;
}

Grouping level_set_groups(const Dataset& data, LevelKey key) {
  Grouping grouping;
  grouping.kind = GroupingKind::Partition;
  grouping.universe = static_cast<int>(data.size());
  grouping.measure = MeasureKind::Empirical;
  grouping.provenance.constructor = "level_sets";
  grouping.provenance.params = {
      {"by", key == LevelKey::Predictions ? "predictions" : "inputs"}};
  for (auto& set : level_sets(data, key)) {
    const int first = set.front();
    std::string label = key == LevelKey::Predictions
                            ? "p=" + fmt(data.predictions[first])
                            : "x#" + std::to_string(first);
    grouping.groups.push_back(make_group(std::move(set), std::move(label)));
  }
  return grouping;
}

Grouping knn_groups(const Dataset& data, int k, const MetricSpec& metric,
                    GroupSpace space) {
  const auto n = static_cast<int>(data.size());
  if (k < 1 || k > n)
    throw std::invalid_argument("knn_groups: k must be in [1, N] (k = " +
                                std::to_string(k) + ", N = " + std::to_string(n) + ")");

  const Eigen::VectorXd divisors = metric_divisors(data.features, metric);

  // Input level sets for the duplicate closure.
  const auto input_sets = level_sets(data, LevelKey::Inputs);
  std::vector<int> set_of(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < input_sets.size(); ++s)
    for (int i : input_sets[s]) set_of[static_cast<std::size_t>(i)] = static_cast<int>(s);

  Grouping grouping;
  grouping.kind = GroupingKind::Overlapping;
  grouping.universe = n;
  grouping.measure = MeasureKind::Uniform;
  grouping.provenance.constructor = "knn";
  grouping.provenance.params = {
      {"k", fmt(k)},
      {"space", space == GroupSpace::Features ? "features" : "predictions"}};

  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (space == GroupSpace::Features) {
      const Eigen::VectorXd anchor = data.features.row(j).transpose();
      for (int i = 0; i < n; ++i)
        dist[static_cast<std::size_t>(i)] = scaled_distance(
            anchor, data.features.row(i).transpose(), divisors, metric.norm);
    } else {
      for (int i = 0; i < n; ++i)
        dist[static_cast<std::size_t>(i)] =
            std::abs(data.predictions[i] - data.predictions[j]);
    }
    std::iota(order.begin(), order.end(), 0);
    auto nearer = [&dist](int a, int b) {
      const double da = dist[static_cast<std::size_t>(a)];
      const double db = dist[static_cast<std::size_t>(b)];
      return da != db ? da < db : a < b;  // boundary ties: smaller index
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), nearer);

    // Exact-duplicate inputs are always all included, so the group stays
    // input-complete; it may exceed k.
    std::unordered_set<int> closed;
    for (auto it = order.begin(); it != order.begin() + k; ++it)
      for (int twin : input_sets[static_cast<std::size_t>(set_of[static_cast<std::size_t>(*it)])])
        closed.insert(twin);
    std::vector<int> indices(closed.begin(), closed.end());
    std::sort(indices.begin(), indices.end());

    grouping.groups.push_back(make_group(std::move(indices), "anchor " + std::to_string(j), j));
  }
  return grouping;
}

namespace {

GroupDistribution normalized_kernel_distribution(
    const Dataset& data, int anchor, const std::vector<double>& raw,
    const std::vector<char>* mask) {
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (!mask || (*mask)[i]) total += raw[i];

  GroupDistribution dist;
  dist.anchor = anchor;
  dist.label = "anchor " + std::to_string(anchor);
  if (!(total > 0.0) || !std::isfinite(total)) return dist;  // empty support

  std::vector<int> support;
  std::vector<double> weights;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    if (raw[i] > 0.0) {
      support.push_back(static_cast<int>(i));
      weights.push_back(raw[i] / total);
    }
  }
  dist.indices = std::move(support);
  dist.weights = Eigen::Map<Eigen::VectorXd>(weights.data(),
                                             static_cast<Eigen::Index>(weights.size()));
  (void)data;
  return dist;
}

std::vector<double> kernel_row(const Dataset& data, int anchor, const KernelSpec& spec,
                               const Eigen::VectorXd& divisors, const MetricSpec& metric) {
  const auto n = static_cast<std::size_t>(data.size());
  std::vector<double> raw(n);
  if (spec.space == GroupSpace::Features) {
    const Eigen::VectorXd a = data.features.row(anchor).transpose();
    for (std::size_t i = 0; i < n; ++i)
      raw[i] = kernel_value(
          spec.shape,
          scaled_distance(a, data.features.row(static_cast<Eigen::Index>(i)).transpose(),
                          divisors, metric.norm) /
              spec.bandwidth);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      raw[i] = kernel_value(spec.shape,
                            std::abs(data.predictions[static_cast<Eigen::Index>(i)] -
                                     data.predictions[anchor]) /
                                spec.bandwidth);
  }
  return raw;
}

void check_kernel(const KernelSpec& spec) {
  if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth))
    throw std::invalid_argument("kernel: bandwidth must be positive");
}

std::string kernel_name(KernelShape shape) {
  switch (shape) {
    case KernelShape::Gaussian: return "gaussian";
    case KernelShape::Epanechnikov: return "epanechnikov";
    case KernelShape::Boxcar: return "boxcar";
  }
  return "?";
}

}  // namespace

Grouping kernel_distributions(const Dataset& data, const KernelSpec& spec,
                              const MetricSpec& metric) {
  check_kernel(spec);
  const Eigen::VectorXd divisors = metric_divisors(data.features, metric);

  Grouping grouping;
  grouping.kind = GroupingKind::Weighted;
  grouping.universe = static_cast<int>(data.size());
  grouping.measure = MeasureKind::Uniform;
  grouping.provenance.constructor = "kernel";
  grouping.provenance.params = {
      {"shape", kernel_name(spec.shape)},
      {"bandwidth", fmt(spec.bandwidth)},
      {"space", spec.space == GroupSpace::Features ? "features" : "predictions"}};

  for (int j = 0; j < static_cast<int>(data.size()); ++j) {
    auto raw = kernel_row(data, j, spec, divisors, metric);
    auto dist = normalized_kernel_distribution(data, j, raw, nullptr);
    if (dist.indices.empty())
      throw std::runtime_error(
          "kernel_distributions: all kernel weights are zero at anchor " +
          std::to_string(j) + " (bandwidth far too small)");
    grouping.members.push_back(std::move(dist));
  }
  return grouping;
}

Grouping mlce_groups(const Dataset& data, const KernelSpec& spec,
                     const BinningScheme& scheme, const MetricSpec& metric) {
  check_kernel(spec);
  if (scheme.space != BinSpace::Predictions)
    throw std::invalid_argument("mlce_groups: scheme must be over predictions");
  const auto edges = prediction_edges(data, scheme);
  const Eigen::VectorXd divisors = metric_divisors(data.features, metric);

  std::vector<int> bin(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i)
    bin[static_cast<std::size_t>(i)] = bin_of(data.predictions[i], edges);

  // The kernel operates on raw feature space (no learned representation).
  KernelSpec feature_kernel = spec;
  feature_kernel.space = GroupSpace::Features;

  Grouping grouping;
  grouping.kind = GroupingKind::Weighted;
  grouping.universe = static_cast<int>(data.size());
  grouping.measure = MeasureKind::Uniform;
  grouping.provenance.constructor = "mlce_groups";
  grouping.provenance.params = {{"shape", kernel_name(spec.shape)},
                                {"bandwidth", fmt(spec.bandwidth)},
                                {"bins", fmt(scheme.count)},
                                {"mode", scheme.mode == BinMode::EqualWidth
                                             ? "equal_width"
                                             : "equal_frequency"}};

  for (int j = 0; j < static_cast<int>(data.size()); ++j) {
    auto raw = kernel_row(data, j, feature_kernel, divisors, metric);
    std::vector<char> mask(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      mask[i] = bin[i] == bin[static_cast<std::size_t>(j)];
    auto dist = normalized_kernel_distribution(data, j, raw, &mask);
    if (dist.indices.empty()) {
      grouping.provenance.notes.push_back("anchor " + std::to_string(j) +
                                          " dropped: no in-bin kernel mass");
      continue;
    }
    grouping.members.push_back(std::move(dist));
  }
  return grouping;
}

namespace {

// Partition coverage map: cell id per index; throws when not a partition.
std::vector<int> partition_cells(const Grouping& grouping, const char* what) {
  if (grouping.kind != GroupingKind::Partition)
    throw std::invalid_argument(std::string(what) + ": non-partition input");
  std::vector<int> cell(static_cast<std::size_t>(grouping.universe), -1);
  for (std::size_t g = 0; g < grouping.groups.size(); ++g)
    for (int i : grouping.groups[g].indices) {
      if (i < 0 || i >= grouping.universe || cell[static_cast<std::size_t>(i)] != -1)
        throw std::invalid_argument(std::string(what) + ": non-partition input");
      cell[static_cast<std::size_t>(i)] = static_cast<int>(g);
    }
  for (int c : cell)
    if (c == -1) throw std::invalid_argument(std::string(what) + ": non-partition input");
  return cell;
}

}  // namespace

bool is_refinement(const Grouping& finer, const Grouping& coarser) {
  if (finer.universe != coarser.universe)
    throw std::invalid_argument("is_refinement: partitions of different index sets");
  (void)partition_cells(finer, "is_refinement");
  const auto coarse_cell = partition_cells(coarser, "is_refinement");

  for (const auto& group : finer.groups) {
    const int target = coarse_cell[static_cast<std::size_t>(group.indices.front())];
    for (int i : group.indices)
      if (coarse_cell[static_cast<std::size_t>(i)] != target) return false;
  }
  return true;
}

std::vector<int> membership_counts(const Grouping& grouping) {
  if (grouping.kind == GroupingKind::Weighted)
    throw std::invalid_argument("membership_counts: undefined for weighted groupings");
  std::vector<int> counts(static_cast<std::size_t>(grouping.universe), 0);
  for (const auto& group : grouping.groups)
    for (int i : group.indices) ++counts[static_cast<std::size_t>(i)];
  return counts;
}

}  // namespace calkit
