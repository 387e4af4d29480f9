#pragma once

#include <Eigen/Core>

#include <vector>

#include "calkit/dataset.hpp"
#include "calkit/groups.hpp"

namespace calkit {

// ---------------------------------------------------------------------------
// Construction specs
// ---------------------------------------------------------------------------

enum class BinMode { EqualWidth, EqualFrequency };
enum class BinSpace { Predictions, Feature };

// A 1-d binning scheme over the prediction space [0,1] or over one named
// feature. Bins are half-open [l, u) with the final bin closed, so coverage
// is total with deterministic membership.
struct BinningScheme {
  int count = 10;
  BinMode mode = BinMode::EqualWidth;
  BinSpace space = BinSpace::Predictions;
  int feature = 0;  // column index, used when space == Feature
};

enum class NormKind { L1, L2, LInf };
enum class ScalingKind { None, Range, StdDev };

// L^p distance with optional per-dimension scaling by the observed range or
// standard deviation, giving each dimension comparable relevance. Scaling
// divisors are strictly positive; constant features get divisor 1.
struct MetricSpec {
  NormKind norm = NormKind::L2;
  ScalingKind scaling = ScalingKind::Range;
};

enum class KernelShape { Gaussian, Epanechnikov, Boxcar };
enum class GroupSpace { Features, Predictions };

// Radial kernel with bandwidth gamma > 0, evaluated at scaled distance.
// All three shapes are bounded, nonincreasing, and strictly positive on a
// neighbourhood of the origin.
struct KernelSpec {
  KernelShape shape = KernelShape::Gaussian;
  double bandwidth = 1.0;  // gamma > 0
  GroupSpace space = GroupSpace::Features;
};

// Kernel profile value at normalized distance t = distance / bandwidth.
double kernel_value(KernelShape shape, double t);

// Per-dimension scaling divisors for a feature matrix under a metric spec.
Eigen::VectorXd metric_divisors(const Eigen::MatrixXd& features,
                                const MetricSpec& metric);

// Scaled L^p distance between two points.
double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& divisors, NormKind norm);

// ---------------------------------------------------------------------------
// Grouping constructors. All of them produce input-complete groupings with
// only nonempty members, and are deterministic for a fixed dataset.
// ---------------------------------------------------------------------------

// Partition of the dataset by prediction bins. Equal-width bins split [0,1]
// evenly; equal-frequency bins cut at sorted prediction quantiles (requires
// N >= count). Empty bins are dropped with a provenance note. Measure
// defaults to Empirical.
Grouping prediction_bins(const Dataset& data, const BinningScheme& scheme);

// Partition by a per-dimension equal-width grid over the observed [min, max]
// of each feature (the maximum belongs to the top bin). A constant feature
// with more than one requested bin collapses to one bin with a provenance
// note. Only nonempty cells are kept.
Grouping feature_grid(const Dataset& data, const std::vector<int>& bins_per_dim);

// Partition by exact level sets of predictions or inputs.
Grouping level_set_groups(const Dataset& data, LevelKey key);

// Overlapping family: for every datapoint, the group of its k nearest
// datapoints (itself included, at distance zero). Boundary distance ties
// break toward the smaller index, except that exact-duplicate inputs are
// always all included, so a group may exceed k.
Grouping knn_groups(const Dataset& data, int k, const MetricSpec& metric = {},
                    GroupSpace space = GroupSpace::Features);

// Weighted family: one normalized kernel distribution per datapoint, weights
// proportional to the kernel at scaled distance from the anchor. Throws,
// naming the anchor, if an anchor's weights are all numerically zero.
Grouping kernel_distributions(const Dataset& data, const KernelSpec& spec,
                              const MetricSpec& metric = {});

// Weighted family for kernel-localised bin errors: per anchor, the kernel
// weights masked to datapoints whose prediction falls in the anchor's bin,
// renormalized. The kernel operates on raw feature space. Anchors whose
// masked weights vanish are dropped with a provenance note.
Grouping mlce_groups(const Dataset& data, const KernelSpec& spec,
                     const BinningScheme& scheme, const MetricSpec& metric = {});

// True iff every member of `finer` is a subset of some member of `coarser`.
// Both arguments must be partitions of the same index set.
bool is_refinement(const Grouping& finer, const Grouping& coarser);

// For each datapoint, the number of member groups containing it. Defined for
// partition and overlapping kinds only.
std::vector<int> membership_counts(const Grouping& grouping);

}  // namespace calkit
