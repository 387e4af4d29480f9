#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "calkit/agglomerate.hpp"
#include "calkit/dataset.hpp"
#include "calkit/errors.hpp"
#include "calkit/grouping.hpp"

namespace calkit {

// One retained grouping member in a score report. Both the signed and the
// absolute error are recorded regardless of the requested signedness, since
// fairness reading needs the signs.
struct GroupRow {
  std::string id;
  int size = 0;          // member count (support size for distributions)
  double weight = 0.0;   // measure mass after renormalization
  double signed_error = 0.0;
  double abs_error = 0.0;
};

// A named global score with full provenance: the per-group table, the
// grouping construction record, the agglomerator description and the dataset
// fingerprint. The global value is reproducible from the table and the
// agglomerator description.
struct ScoreReport {
  std::string name;
  double value = 0.0;
  Signedness signedness = Signedness::Absolute;
  MeasureKind measure = MeasureKind::Empirical;
  std::string agglomerator;
  Provenance grouping;
  std::vector<GroupRow> per_group;
  std::int64_t dataset_size = 0;
  std::int64_t dataset_dim = 0;
  std::uint64_t dataset_hash = 0;
};

// Fully general scoring entry point: error_profile then apply. The named
// scores below are thin presets over it.
ScoreReport global_score(const Dataset& data, const Grouping& grouping,
                         Signedness signedness, const Agglomerator& agg,
                         std::string name = "global_score");

// Size-weighted mean of absolute prediction-bin errors.
ScoreReport ece(const Dataset& data, const BinningScheme& scheme);

// Unweighted mean of absolute errors over nonempty prediction bins.
ScoreReport ace(const Dataset& data, const BinningScheme& scheme);

// Maximum absolute prediction-bin error.
ScoreReport mce(const Dataset& data, const BinningScheme& scheme);

// Mean squared error of predictions against labels.
double brier(const Dataset& data);

struct BrierDecomposition {
  double calibration = 0.0;  // sum of weight * (level-set signed error)^2
  double refinement = 0.0;   // sum of weight * pbar (1 - pbar)
};

// Exact two-term decomposition of the Brier score over exact level sets of
// the chosen key; the terms sum to brier(data).
BrierDecomposition brier_decomposition(const Dataset& data, LevelKey by);

// Per-anchor signed errors of an overlapping or weighted grouping with one
// member per anchor datapoint.
std::vector<std::pair<int, double>> local_errors(const Dataset& data,
                                                 const Grouping& grouping);

// Maximum kernel-localised error over mlce_groups anchors. Signed maximum by
// default; the absolute variant is available and flagged in provenance.
ScoreReport mlce(const Dataset& data, const KernelSpec& spec,
                 const BinningScheme& scheme, bool absolute = false);

}  // namespace calkit
