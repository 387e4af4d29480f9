#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calkit/agglomerate.hpp"
#include "calkit/grouping.hpp"
#include "calkit/io.hpp"
#include "calkit/scores.hpp"
#include "calkit/synthetic.hpp"

namespace calkit {

// Parsed grouping constructor request. `type` selects the constructor; only
// the fields that constructor reads are meaningful.
struct GroupingConfig {
  std::string type;  // prediction_bins | feature_grid | level_sets | knn | kernel | mlce
  BinningScheme scheme;
  std::vector<int> bins_per_dim;
  LevelKey level_key = LevelKey::Predictions;
  int k = 1;
  GroupSpace space = GroupSpace::Features;
  MetricSpec metric;
  KernelSpec kernel;
};

struct ScoreRequest {
  std::string id;
  std::string preset;  // ece | ace | mce | brier | brier_decomposition | mlce; empty for generic
  // preset parameters
  BinningScheme scheme;
  LevelKey decomposition_key = LevelKey::Inputs;
  KernelSpec kernel;
  bool mlce_absolute = false;
  // generic parameters
  GroupingConfig grouping;
  Signedness signedness = Signedness::Absolute;
  MeasureKind measure = MeasureKind::Empirical;
  std::optional<Agglomerator> agglomerator;
};

struct ExperimentRequest {
  std::string id;
  std::string type;  // axioms | variance | resolution_fixture | overlap_fixture |
                     // knn_consistency | kernel_consistency
  // axioms
  std::optional<Agglomerator> agglomerator;
  std::vector<Axiom> axioms;
  int trials = 1000;
  double tolerance = 1e-9;
  // synthetic experiments
  SyntheticSpec spec;
  BayesFunction predictor;
  bool predictor_is_oracle = false;
  int group_size = 25;
  int resamples = 10000;
  std::vector<int> ladder;
  int anchors = 500;
  KernelShape kernel_shape = KernelShape::Gaussian;
  // fixtures
  std::vector<int> labels1, labels2;
  double epsilon = 0.1;
  int fixture_dim = 1, fixture_k = 2, fixture_n = 3;
  int knn_k = 0;  // k used when counting membership on the overlap fixture (0 = fixture_k)
};

// Mirrors the config file: dataset path and roles, score and experiment
// requests, master seed, output path. A seed is required whenever any
// randomized request is present.
struct RunConfig {
  std::string data_path;
  ColumnRoles roles;
  std::optional<std::uint64_t> seed;
  std::string out_path = "report.json";
  std::vector<ScoreRequest> scores;
  std::vector<ExperimentRequest> experiments;
};

// Parses and validates a config document (JSON text). Relative dataset paths
// resolve against base_dir. Throws ValidationError on any unresolvable name
// or malformed field.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir);

struct RunOutput {
  std::string report_json;  // machine-readable document; byte-stable for
                            // identical (dataset bytes, config, seed)
  std::string human_text;
};

// Executes every request against the loaded dataset and assembles the
// report. Sub-failures surface as ExecutionError naming the failing request.
RunOutput run(const RunConfig& config);

// The registered grouping/agglomerator/preset/experiment catalog.
std::string catalog_text();

}  // namespace calkit
