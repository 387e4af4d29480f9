#include "calkit/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "calkit/rng.hpp"

namespace calkit {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void check_bayes(const BayesFunction& f, int dimension) {
  switch (f.family) {
    case BayesFamily::Constant:
      if (!(f.value >= 0.0 && f.value <= 1.0))
        throw std::invalid_argument("bayes: constant level must lie in [0, 1]");
      return;
    case BayesFamily::Step:
      if (!(f.low >= 0.0 && f.low <= 1.0 && f.high >= 0.0 && f.high <= 1.0))
        throw std::invalid_argument("bayes: step levels must lie in [0, 1]");
      break;
    case BayesFamily::LinearClipped:
    case BayesFamily::Logistic:
      break;
  }
  if (f.slope.size() != static_cast<Eigen::Index>(dimension))
    throw std::invalid_argument("bayes: slope must have one entry per feature dimension");
}

}  // namespace

double BayesFunction::operator()(const Eigen::VectorXd& x) const {
  switch (family) {
    case BayesFamily::Constant:
      return value;
    case BayesFamily::LinearClipped:
      return std::clamp(slope.dot(x) + intercept, 0.0, 1.0);
    case BayesFamily::Logistic:
      return 1.0 / (1.0 + std::exp(-(slope.dot(x) + intercept)));
    case BayesFamily::Step:
      return slope.dot(x) + intercept >= 0.0 ? high : low;
  }
  return 0.0;
}

std::string BayesFunction::describe() const {
  switch (family) {
    case BayesFamily::Constant:
      return "constant(" + fmt(value) + ")";
    case BayesFamily::LinearClipped: {
      std::string out = "linear_clipped([";
      for (Eigen::Index j = 0; j < slope.size(); ++j)
        out += (j ? "," : "") + fmt(slope[j]);
      return out + "]," + fmt(intercept) + ")";
    }
    case BayesFamily::Logistic: {
      std::string out = "logistic([";
      for (Eigen::Index j = 0; j < slope.size(); ++j)
        out += (j ? "," : "") + fmt(slope[j]);
      return out + "]," + fmt(intercept) + ")";
    }
    case BayesFamily::Step:
      return "step(" + fmt(low) + "," + fmt(high) + ")";
  }
  return "?";
}

SyntheticSample generate(const SyntheticSpec& spec) {
  if (spec.dimension < 1) throw std::invalid_argument("generate: dimension must be >= 1");
  if (spec.sample_size < 1)
    throw std::invalid_argument("generate: sample_size must be >= 1");
  check_bayes(spec.bayes, spec.dimension);

  Rng rng(spec.seed);
  SyntheticSample sample;
  sample.features.resize(spec.sample_size, spec.dimension);
  sample.labels.resize(spec.sample_size);
  Eigen::VectorXd x(spec.dimension);
  for (int i = 0; i < spec.sample_size; ++i) {
    for (int j = 0; j < spec.dimension; ++j)
      x[j] = spec.law == FeatureLaw::Uniform01 ? rng.uniform() : rng.normal();
    sample.features.row(i) = x.transpose();
    sample.labels[i] = rng.bernoulli(spec.bayes(x)) ? 1.0 : 0.0;
  }
  return sample;
}

Dataset attach_predictor(const SyntheticSample& sample, const BayesFunction& predictor) {
  check_bayes(predictor, static_cast<int>(sample.features.cols()));
  Eigen::VectorXd predictions(sample.features.rows());
  for (Eigen::Index i = 0; i < sample.features.rows(); ++i)
    predictions[i] = predictor(sample.features.row(i).transpose());
  return attach_predictions(sample, std::move(predictions));
}

Dataset attach_predictions(const SyntheticSample& sample, Eigen::VectorXd predictions) {
  return make_dataset(sample.features, sample.labels, std::move(predictions));
}

VarianceResult variance_experiment(const SyntheticSpec& spec,
                                   const BayesFunction& predictor, int group_size,
                                   int resamples, std::uint64_t seed) {
  if (group_size < 1)
    throw std::invalid_argument("variance_experiment: group_size must be >= 1");
  if (resamples < 100)
    throw std::invalid_argument("variance_experiment: needs resamples >= 100");
  check_bayes(spec.bayes, spec.dimension);
  check_bayes(predictor, spec.dimension);

  Rng rng = Rng(seed).fork(1);
  Eigen::VectorXd x(spec.dimension);
  auto draw_x = [&](Rng& r) {
    for (int j = 0; j < spec.dimension; ++j)
      x[j] = spec.law == FeatureLaw::Uniform01 ? r.uniform() : r.normal();
  };

  // Variance of the group error across i.i.d. groups of size K.
  std::vector<double> errors(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r) {
    double sum = 0.0;
    for (int i = 0; i < group_size; ++i) {
      draw_x(rng);
      const double y = rng.bernoulli(spec.bayes(x)) ? 1.0 : 0.0;
      sum += predictor(x) - y;
    }
    errors[static_cast<std::size_t>(r)] = sum / static_cast<double>(group_size);
  }
  const double mean =
      std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(resamples);
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);

  // Monte-Carlo estimate of E[p(X)(1 - p(X))] from the oracle.
  Rng oracle_rng = Rng(seed).fork(2);
  const int oracle_draws = 100000;
  double acc = 0.0;
  for (int i = 0; i < oracle_draws; ++i) {
    draw_x(oracle_rng);
    const double p = spec.bayes(x);
    acc += p * (1.0 - p);
  }

  VarianceResult result;
  result.empirical = ss / static_cast<double>(resamples - 1);
  result.mean_p_one_minus_p = acc / static_cast<double>(oracle_draws);
  result.theoretical = result.mean_p_one_minus_p / static_cast<double>(group_size);
  result.group_size = group_size;
  result.resamples = resamples;
  return result;
}

ResolutionFixture resolution_fixture(const std::vector<int>& labels1,
                                     const std::vector<int>& labels2, double epsilon) {
  if (labels1.empty() || labels2.empty())
    throw std::invalid_argument("resolution_fixture: label lists must be nonempty");
  for (const auto* labels : {&labels1, &labels2})
    for (int y : *labels)
      if (y != 0 && y != 1)
        throw std::invalid_argument("resolution_fixture: labels must be 0 or 1");

  const auto n1 = static_cast<double>(labels1.size());
  const auto n2 = static_cast<double>(labels2.size());
  const double n = n1 + n2;
  double sum1 = 0.0, sum2 = 0.0;
  for (int y : labels1) sum1 += y;
  for (int y : labels2) sum2 += y;
  const double z1 = sum1 / n1, z2 = sum2 / n2;

  if ((sum1 + sum2 == 0.0) || (sum1 + sum2 == n))
    throw std::invalid_argument(
        "resolution_fixture: labels must not all be equal across the union");

  const auto total = static_cast<int>(labels1.size() + labels2.size());
  Eigen::MatrixXd features(total, 1);
  for (int i = 0; i < total; ++i) features(i, 0) = static_cast<double>(i);  // distinct inputs
  Eigen::VectorXd labels(total);
  for (std::size_t i = 0; i < labels1.size(); ++i)
    labels[static_cast<Eigen::Index>(i)] = labels1[i];
  for (std::size_t i = 0; i < labels2.size(); ++i)
    labels[static_cast<Eigen::Index>(labels1.size() + i)] = labels2[i];

  Eigen::VectorXd predictions(total);
  if (z1 != z2) {
    predictions.setConstant((sum1 + sum2) / n);
  } else {
    // Two-level predictor around the common label mean; feasibility keeps
    // both levels inside (0, 1).
    const double hi_bound = (1.0 - z1) * n / n2;
    const double lo_bound = z1 * n / n1;
    const double max_eps = std::min(hi_bound, lo_bound);
    if (!(epsilon > 0.0) || !(z1 + epsilon * n2 / n < 1.0) ||
        !(z1 - epsilon * n1 / n > 0.0))
      throw std::invalid_argument(
          "resolution_fixture: infeasible epsilon; feasible interval is (0, " +
          fmt(max_eps) + ")");
    predictions.head(static_cast<Eigen::Index>(labels1.size()))
        .setConstant(z1 + epsilon * n2 / n);
    predictions.tail(static_cast<Eigen::Index>(labels2.size()))
        .setConstant(z1 - epsilon * n1 / n);
  }

  ResolutionFixture fixture;
  fixture.data = make_dataset(std::move(features), std::move(labels), std::move(predictions));
  fixture.first.label = "I1";
  fixture.second.label = "I2";
  for (int i = 0; i < static_cast<int>(labels1.size()); ++i)
    fixture.first.indices.push_back(i);
  for (int i = static_cast<int>(labels1.size()); i < total; ++i)
    fixture.second.indices.push_back(i);
  return fixture;
}

Eigen::MatrixXd overlap_fixture(int dimension, int k, int sample_size) {
  if (dimension < 1) throw std::invalid_argument("overlap_fixture: dimension must be >= 1");
  if (k < 2) throw std::invalid_argument("overlap_fixture: k must be >= 2");
  if (sample_size < 2) throw std::invalid_argument("overlap_fixture: N must be >= 2");

  const int base = 2 * dimension * (k - 1) + 1;
  const int axis_count = std::min(sample_size, base) - 2;
  const int surplus = sample_size > base ? sample_size - base : 0;

  Eigen::MatrixXd points = Eigen::MatrixXd::Zero(sample_size, dimension);
  // Index 0: the far outlier along the first axis, a member of no group but
  // its own.
  points(0, 0) = 3.0;

  // Axis points fill (sign, dimension) rays in order, at most k-1 per ray
  // (the outlier consumes the first +e_1 slot). Distinct radii in (0.5, 0.9)
  // keep every distance comparison strict beyond the ties the construction
  // needs.
  const int per_ray = k - 1;
  int row = 1;
  int slot = 1;  // global slot 0 is the outlier
  for (int ray = 0; ray < 2 * dimension && row <= axis_count; ++ray) {
    const double sign = ray < dimension ? 1.0 : -1.0;
    const int dim = ray % dimension;
    const int capacity = (ray == 0) ? per_ray - 1 : per_ray;
    for (int j = 0; j < capacity && row <= axis_count; ++j, ++slot) {
      const double mu =
          0.5 + 0.4 * static_cast<double>(slot) / static_cast<double>(2 * dimension * per_ray);
      points(row, dim) = sign * mu;
      ++row;
    }
  }
  // Surplus points sit together far out on the negative first axis
  // (duplicate inputs); the origin keeps the last index and is near every
  // axis point.
  for (int s = 0; s < surplus; ++s) points(row + s, 0) = -2.0;
  // points(sample_size - 1, :) stays at the origin.
  return points;
}

namespace {

using ScheduleDesc = std::pair<std::string, std::string>;

void check_ladder(const std::vector<int>& ladder) {
  if (ladder.empty()) throw std::invalid_argument("consistency: ladder must be nonempty");
  for (std::size_t r = 0; r < ladder.size(); ++r) {
    if (ladder[r] < 2) throw std::invalid_argument("consistency: ladder sizes must be >= 2");
    if (r > 0 && ladder[r] <= ladder[r - 1])
      throw std::invalid_argument("consistency: ladder sizes must be strictly increasing");
  }
}

}  // namespace

ConsistencyLadder knn_consistency(const SyntheticSpec& spec,
                                  const BayesFunction& predictor,
                                  const std::vector<int>& ladder,
                                  const std::function<int(int)>& k_schedule,
                                  int anchors, const MetricSpec& metric) {
  check_ladder(ladder);
  check_bayes(spec.bayes, spec.dimension);
  check_bayes(predictor, spec.dimension);
  if (anchors < 1) throw std::invalid_argument("consistency: anchors must be >= 1");

  std::function<int(int)> k_of = k_schedule;
  if (!k_of)
    k_of = [](int n) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))); };

  ConsistencyLadder out;
  out.schedule = k_schedule ? "custom k schedule" : "k = ceil(sqrt(N))";

  for (std::size_t rung = 0; rung < ladder.size(); ++rung) {
    const int n = ladder[rung];
    const int k = std::clamp(k_of(n), 1, n);

    SyntheticSpec rung_spec = spec;
    rung_spec.sample_size = n;
    rung_spec.seed = Rng(spec.seed).fork(10 + rung).next_u64();
    const SyntheticSample sample = generate(rung_spec);

    Eigen::VectorXd pred_col(n), z(n);
    for (int i = 0; i < n; ++i) {
      pred_col[i] = predictor(sample.features.row(i).transpose());
      z[i] = pred_col[i] - sample.labels[i];
    }
    const Eigen::VectorXd divisors = metric_divisors(sample.features, metric);

    Rng anchor_rng = Rng(spec.seed).fork(1000 + rung);
    Eigen::VectorXd x(spec.dimension);
    std::vector<double> dist(static_cast<std::size_t>(n));
    std::vector<int> order(static_cast<std::size_t>(n));

    double dev_sum = 0.0;
    for (int a = 0; a < anchors; ++a) {
      for (int j = 0; j < spec.dimension; ++j)
        x[j] = spec.law == FeatureLaw::Uniform01 ? anchor_rng.uniform() : anchor_rng.normal();
      for (int i = 0; i < n; ++i)
        dist[static_cast<std::size_t>(i)] =
            scaled_distance(x, sample.features.row(i).transpose(), divisors, metric.norm);
      std::iota(order.begin(), order.end(), 0);
      auto nearer = [&dist](int p, int q) {
        const double dp = dist[static_cast<std::size_t>(p)];
        const double dq = dist[static_cast<std::size_t>(q)];
        return dp != dq ? dp < dq : p < q;
      };
      std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), nearer);
      double est = 0.0;
      for (int s = 0; s < k; ++s) est += z[order[static_cast<std::size_t>(s)]];
      est /= static_cast<double>(k);

      const double truth = predictor(x) - spec.bayes(x);
      dev_sum += std::abs(est - truth);
    }
    out.rungs.push_back({n, static_cast<double>(k), dev_sum / anchors});
  }
  return out;
}

ConsistencyLadder kernel_consistency(const SyntheticSpec& spec,
                                     const BayesFunction& predictor,
                                     const std::vector<int>& ladder,
                                     const std::function<double(int)>& gamma_schedule,
                                     KernelShape shape, int anchors,
                                     const MetricSpec& metric) {
  check_ladder(ladder);
  check_bayes(spec.bayes, spec.dimension);
  check_bayes(predictor, spec.dimension);
  if (anchors < 1) throw std::invalid_argument("consistency: anchors must be >= 1");

  const int d = spec.dimension;
  std::function<double(int)> gamma_of = gamma_schedule;
  if (!gamma_of)
    gamma_of = [d](int n) { return std::pow(static_cast<double>(n), -1.0 / (d + 2)); };

  ConsistencyLadder out;
  out.schedule = gamma_schedule ? "custom gamma schedule" : "gamma = N^(-1/(d+2))";

  for (std::size_t rung = 0; rung < ladder.size(); ++rung) {
    const int n = ladder[rung];
    const double gamma = gamma_of(n);
    if (!(gamma > 0.0))
      throw std::invalid_argument("consistency: bandwidth schedule must stay positive");

    SyntheticSpec rung_spec = spec;
    rung_spec.sample_size = n;
    rung_spec.seed = Rng(spec.seed).fork(20 + rung).next_u64();
    const SyntheticSample sample = generate(rung_spec);

    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i)
      z[i] = predictor(sample.features.row(i).transpose()) - sample.labels[i];
    const Eigen::VectorXd divisors = metric_divisors(sample.features, metric);

    Rng anchor_rng = Rng(spec.seed).fork(2000 + rung);
    Eigen::VectorXd x(spec.dimension);

    double dev_sum = 0.0;
    for (int a = 0; a < anchors; ++a) {
      for (int j = 0; j < spec.dimension; ++j)
        x[j] = spec.law == FeatureLaw::Uniform01 ? anchor_rng.uniform() : anchor_rng.normal();
      double wsum = 0.0, acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const double w = kernel_value(
            shape,
            scaled_distance(x, sample.features.row(i).transpose(), divisors, metric.norm) /
                gamma);
        wsum += w;
        acc += w * z[i];
      }
      if (!(wsum > 0.0))
        throw std::runtime_error(
            "kernel_consistency: all kernel weights are zero at an anchor "
            "(bandwidth far too small)");
      const double truth = predictor(x) - spec.bayes(x);
      dev_sum += std::abs(acc / wsum - truth);
    }
    out.rungs.push_back({n, gamma, dev_sum / anchors});
  }
  return out;
}

}  // namespace calkit
