#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "calkit/dataset.hpp"
#include "calkit/errors.hpp"
#include "calkit/grouping.hpp"

namespace calkit {

// ---------------------------------------------------------------------------
// Synthetic distributions with a known conditional label probability, plus
// the experiments and fixtures built on them.
// ---------------------------------------------------------------------------

enum class FeatureLaw { Uniform01, StandardNormal };

enum class BayesFamily { LinearClipped, Logistic, Step, Constant };

// A named family of functions x -> [0,1], usable both as the true
// conditional probability and as a synthetic predictor.
struct BayesFunction {
  BayesFamily family = BayesFamily::Constant;
  Eigen::VectorXd slope;   // size d for LinearClipped / Logistic / Step
  double intercept = 0.0;
  double value = 0.5;      // Constant level
  double low = 0.0;        // Step output when slope.x + intercept < 0
  double high = 1.0;       // Step output otherwise

  double operator()(const Eigen::VectorXd& x) const;
  std::string describe() const;
};

struct SyntheticSpec {
  int dimension = 1;
  FeatureLaw law = FeatureLaw::Uniform01;
  BayesFunction bayes;
  int sample_size = 0;
  std::uint64_t seed = 0;
};

// Features drawn i.i.d. from the law, labels Bernoulli(bayes(x)). The spec's
// bayes function is the true-p oracle, evaluable at arbitrary points; a
// predictor column is attached separately.
struct SyntheticSample {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
};

// Deterministic given the spec (draw order is row by row: d features, then
// the label).
SyntheticSample generate(const SyntheticSpec& spec);

Dataset attach_predictor(const SyntheticSample& sample, const BayesFunction& predictor);
Dataset attach_predictions(const SyntheticSample& sample, Eigen::VectorXd predictions);

// ---------------------------------------------------------------------------
// Group-size variance experiment
// ---------------------------------------------------------------------------

struct VarianceResult {
  double empirical = 0.0;    // variance of the group error across resamples
  double theoretical = 0.0;  // E[p(X)(1-p(X))] / K
  double mean_p_one_minus_p = 0.0;
  int group_size = 0;
  int resamples = 0;
};

// Draws `resamples` i.i.d. groups of size K from the spec's law, measures the
// variance of the group error, and estimates the theoretical value from the
// oracle by Monte Carlo. Requires resamples >= 100.
VarianceResult variance_experiment(const SyntheticSpec& spec,
                                   const BayesFunction& predictor, int group_size,
                                   int resamples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Resolution fixture: a dataset whose predictor is perfectly calibrated on
// the union of two disjoint groups but on neither group alone.
// ---------------------------------------------------------------------------

struct ResolutionFixture {
  Dataset data;
  Group first;
  Group second;
};

// Builds the two-group construction for the given label lists. The label
// lists must not be all-equal across the union. When the group label means
// coincide, epsilon must satisfy
//   0 < z - eps*|I1|/(|I1|+|I2|)  and  z + eps*|I2|/(|I1|+|I2|) < 1;
// an infeasible epsilon is rejected with the feasible interval.
ResolutionFixture resolution_fixture(const std::vector<int>& labels1,
                                     const std::vector<int>& labels2, double epsilon);

// ---------------------------------------------------------------------------
// k-NN membership overlap fixture
// ---------------------------------------------------------------------------

// Point configuration on which k-NN group membership is maximally skewed:
// membership_counts attains max = min(N, 2d(k-1)+1) and min = 1 (for N > k).
// Requires k >= 2, N >= 2.
Eigen::MatrixXd overlap_fixture(int dimension, int k, int sample_size);

// ---------------------------------------------------------------------------
// Consistency ladders
// ---------------------------------------------------------------------------

struct ConsistencyRung {
  int sample_size = 0;
  double parameter = 0.0;       // k or gamma at this rung
  double mean_abs_deviation = 0.0;
};

struct ConsistencyLadder {
  std::vector<ConsistencyRung> rungs;  // sample sizes strictly increasing
  std::string schedule;
};

// Mean absolute deviation between the k-NN error estimate around fresh
// anchor points (sampled from the feature law) and the oracle's individual
// error, for each ladder size. Default schedule k = ceil(sqrt(N)).
ConsistencyLadder knn_consistency(const SyntheticSpec& spec,
                                  const BayesFunction& predictor,
                                  const std::vector<int>& ladder,
                                  const std::function<int(int)>& k_schedule = {},
                                  int anchors = 500,
                                  const MetricSpec& metric = {});

// Kernel analogue: per-anchor normalized kernel weights over the sample,
// estimate = weighted mean of prediction - label. Default schedule
// gamma = N^(-1/(d+2)).
ConsistencyLadder kernel_consistency(const SyntheticSpec& spec,
                                     const BayesFunction& predictor,
                                     const std::vector<int>& ladder,
                                     const std::function<double(int)>& gamma_schedule = {},
                                     KernelShape shape = KernelShape::Gaussian,
                                     int anchors = 500,
                                     const MetricSpec& metric = {});

}  // namespace calkit
