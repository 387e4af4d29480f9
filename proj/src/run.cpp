#include "calkit/run.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <utility>

#include "calkit/rng.hpp"

namespace calkit {

using json = nlohmann::ordered_json;

namespace {

// --------------------------------------------------------------------------
// Config parsing
// --------------------------------------------------------------------------

const json& require(const json& j, const std::string& key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end())
    throw ValidationError("config: missing key '" + key + "' in " + where);
  return *it;
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_string())
    throw ValidationError("config: '" + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

double get_double(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number())
    throw ValidationError("config: '" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer())
    throw ValidationError("config: '" + key + "' in " + where + " must be an integer");
  return v.get<int>();
}

Signedness parse_signedness(const std::string& s, const std::string& where) {
  if (s == "signed") return Signedness::Signed;
  if (s == "absolute") return Signedness::Absolute;
  throw ValidationError("config: signedness '" + s + "' in " + where +
                        " (expected signed|absolute)");
}

MeasureKind parse_measure(const std::string& s, const std::string& where) {
  if (s == "uniform") return MeasureKind::Uniform;
  if (s == "empirical") return MeasureKind::Empirical;
  throw ValidationError("config: measure '" + s + "' in " + where +
                        " (expected uniform|empirical)");
}

BinMode parse_bin_mode(const std::string& s, const std::string& where) {
  if (s == "equal_width") return BinMode::EqualWidth;
  if (s == "equal_frequency") return BinMode::EqualFrequency;
  throw ValidationError("config: mode '" + s + "' in " + where +
                        " (expected equal_width|equal_frequency)");
}

KernelShape parse_kernel_shape(const std::string& s, const std::string& where) {
  if (s == "gaussian") return KernelShape::Gaussian;
  if (s == "epanechnikov") return KernelShape::Epanechnikov;
  if (s == "boxcar") return KernelShape::Boxcar;
  throw ValidationError("config: kernel shape '" + s + "' in " + where);
}

MetricSpec parse_metric(const json& j, const std::string& where) {
  MetricSpec metric;
  if (j.contains("norm")) {
    const std::string norm = get_string(j, "norm", where);
    if (norm == "l1") metric.norm = NormKind::L1;
    else if (norm == "l2") metric.norm = NormKind::L2;
    else if (norm == "linf") metric.norm = NormKind::LInf;
    else throw ValidationError("config: norm '" + norm + "' in " + where);
  }
  if (j.contains("scaling")) {
    const std::string scaling = get_string(j, "scaling", where);
    if (scaling == "none") metric.scaling = ScalingKind::None;
    else if (scaling == "range") metric.scaling = ScalingKind::Range;
    else if (scaling == "stddev") metric.scaling = ScalingKind::StdDev;
    else throw ValidationError("config: scaling '" + scaling + "' in " + where);
  }
  return metric;
}

BinningScheme parse_scheme(const json& j, const std::string& where) {
  BinningScheme scheme;
  scheme.count = get_int(j, "bins", where);
  if (j.contains("mode")) scheme.mode = parse_bin_mode(get_string(j, "mode", where), where);
  if (scheme.count < 1) throw ValidationError("config: bins must be >= 1 in " + where);
  return scheme;
}

GroupSpace parse_space(const std::string& s, const std::string& where) {
  if (s == "features") return GroupSpace::Features;
  if (s == "predictions") return GroupSpace::Predictions;
  throw ValidationError("config: space '" + s + "' in " + where);
}

GroupingConfig parse_grouping(const json& j, const std::string& where) {
  GroupingConfig cfg;
  cfg.type = get_string(j, "type", where);
  if (cfg.type == "prediction_bins") {
    cfg.scheme = parse_scheme(j, where);
  } else if (cfg.type == "feature_grid") {
    const json& bins = require(j, "bins_per_dim", where);
    if (!bins.is_array() || bins.empty())
      throw ValidationError("config: bins_per_dim must be a nonempty array in " + where);
    for (const auto& b : bins) cfg.bins_per_dim.push_back(b.get<int>());
  } else if (cfg.type == "level_sets") {
    const std::string by = get_string(j, "by", where);
    if (by == "predictions") cfg.level_key = LevelKey::Predictions;
    else if (by == "inputs") cfg.level_key = LevelKey::Inputs;
    else throw ValidationError("config: by '" + by + "' in " + where);
  } else if (cfg.type == "knn") {
    cfg.k = get_int(j, "k", where);
    if (j.contains("space")) cfg.space = parse_space(get_string(j, "space", where), where);
    if (j.contains("metric")) cfg.metric = parse_metric(j["metric"], where);
  } else if (cfg.type == "kernel") {
    cfg.kernel.shape = parse_kernel_shape(get_string(j, "shape", where), where);
    cfg.kernel.bandwidth = get_double(j, "bandwidth", where);
    if (j.contains("space"))
      cfg.kernel.space = parse_space(get_string(j, "space", where), where);
    if (j.contains("metric")) cfg.metric = parse_metric(j["metric"], where);
  } else if (cfg.type == "mlce") {
    cfg.kernel.shape = parse_kernel_shape(get_string(j, "shape", where), where);
    cfg.kernel.bandwidth = get_double(j, "bandwidth", where);
    cfg.scheme = parse_scheme(j, where);
    if (j.contains("metric")) cfg.metric = parse_metric(j["metric"], where);
  } else {
    throw ValidationError("config: unknown grouping type '" + cfg.type + "' in " + where +
                          " (see --list-scores)");
  }
  return cfg;
}

Agglomerator parse_agglomerator(const json& j, const std::string& where) {
  const std::string type = get_string(j, "type", where);
  try {
    if (type == "mean") return Agglomerator::mean();
    if (type == "max") return Agglomerator::max();
    if (type == "std_dev") return Agglomerator::std_dev();
    if (type == "range_dev") return Agglomerator::range_dev();
    if (type == "cvar") return Agglomerator::cvar(get_double(j, "alpha", where));
    if (type == "superquantile_dev")
      return Agglomerator::superquantile_dev(get_double(j, "alpha", where));
    if (type == "cvar_mixture") {
      const json& comps = require(j, "components", where);
      if (!comps.is_array())
        throw ValidationError("config: components must be an array in " + where);
      std::vector<std::pair<double, double>> mixture;
      for (const auto& c : comps)
        mixture.emplace_back(get_double(c, "alpha", where), get_double(c, "weight", where));
      return Agglomerator::cvar_mixture(std::move(mixture));
    }
    if (type == "quadrangle_risk")
      return Agglomerator::quadrangle_risk(
          parse_agglomerator(require(j, "inner", where), where + " inner"));
    if (type == "quadrangle_dev")
      return Agglomerator::quadrangle_dev(
          parse_agglomerator(require(j, "inner", where), where + " inner"));
  } catch (const std::invalid_argument& e) {
    throw ValidationError("config: " + where + ": " + e.what());
  }
  throw ValidationError("config: unknown agglomerator '" + type + "' in " + where +
                        " (see --list-scores)");
}

BayesFunction parse_bayes(const json& j, const std::string& where) {
  BayesFunction f;
  const std::string family = get_string(j, "family", where);
  if (family == "constant") {
    f.family = BayesFamily::Constant;
    f.value = get_double(j, "value", where);
    return f;
  }
  const json& slope = require(j, "slope", where);
  if (!slope.is_array() || slope.empty())
    throw ValidationError("config: slope must be a nonempty array in " + where);
  f.slope.resize(static_cast<Eigen::Index>(slope.size()));
  for (std::size_t s = 0; s < slope.size(); ++s)
    f.slope[static_cast<Eigen::Index>(s)] = slope[s].get<double>();
  if (j.contains("intercept")) f.intercept = get_double(j, "intercept", where);
  if (family == "linear_clipped") f.family = BayesFamily::LinearClipped;
  else if (family == "logistic") f.family = BayesFamily::Logistic;
  else if (family == "step") {
    f.family = BayesFamily::Step;
    f.low = get_double(j, "low", where);
    f.high = get_double(j, "high", where);
  } else {
    throw ValidationError("config: unknown bayes family '" + family + "' in " + where);
  }
  return f;
}

std::vector<Axiom> parse_axioms(const json& j, const std::string& where) {
  std::vector<Axiom> axioms;
  if (!j.is_array() || j.empty())
    throw ValidationError("config: axioms must be a nonempty array in " + where);
  for (const auto& a : j) {
    const std::string name = a.get<std::string>();
    if (name == "A1") axioms.push_back(Axiom::Monotonicity);
    else if (name == "A2") axioms.push_back(Axiom::TranslationEquivariance);
    else if (name == "A3") axioms.push_back(Axiom::PositiveHomogeneity);
    else if (name == "A4") axioms.push_back(Axiom::Subadditivity);
    else if (name == "A5") axioms.push_back(Axiom::LawInvariance);
    else if (name == "A6") axioms.push_back(Axiom::Normalisation);
    else if (name == "A7") axioms.push_back(Axiom::Agreement);
    else if (name == "aversity") axioms.push_back(Axiom::Aversity);
    else throw ValidationError("config: unknown axiom '" + name + "' in " + where);
  }
  return axioms;
}

SyntheticSpec parse_synthetic(const json& j, const std::string& where) {
  SyntheticSpec spec;
  spec.dimension = j.contains("dimension") ? get_int(j, "dimension", where) : 1;
  if (j.contains("law")) {
    const std::string law = get_string(j, "law", where);
    if (law == "uniform") spec.law = FeatureLaw::Uniform01;
    else if (law == "normal") spec.law = FeatureLaw::StandardNormal;
    else throw ValidationError("config: unknown feature law '" + law + "' in " + where);
  }
  spec.bayes = parse_bayes(require(j, "bayes", where), where + " bayes");
  return spec;
}

bool experiment_is_randomized(const std::string& type) {
  return type == "axioms" || type == "variance" || type == "knn_consistency" ||
         type == "kernel_consistency";
}

ExperimentRequest parse_experiment(const json& j, std::size_t index) {
  ExperimentRequest req;
  const std::string where =
      "experiments[" + std::to_string(index) + "]";
  req.id = j.contains("id") ? get_string(j, "id", where)
                            : "experiment_" + std::to_string(index);
  req.type = get_string(j, "type", where);

  if (req.type == "axioms") {
    req.agglomerator = parse_agglomerator(require(j, "agglomerator", where), where);
    req.axioms = parse_axioms(require(j, "axioms", where), where);
    if (j.contains("trials")) req.trials = get_int(j, "trials", where);
    if (j.contains("tolerance")) req.tolerance = get_double(j, "tolerance", where);
    if (req.trials < 1) throw ValidationError("config: trials must be >= 1 in " + where);
  } else if (req.type == "variance") {
    req.spec = parse_synthetic(j, where);
    req.predictor = j.contains("predictor")
                        ? parse_bayes(j["predictor"], where + " predictor")
                        : req.spec.bayes;
    req.group_size = get_int(j, "group_size", where);
    if (j.contains("resamples")) req.resamples = get_int(j, "resamples", where);
  } else if (req.type == "resolution_fixture") {
    const json& l1 = require(j, "labels1", where);
    const json& l2 = require(j, "labels2", where);
    if (!l1.is_array() || !l2.is_array())
      throw ValidationError("config: labels1/labels2 must be arrays in " + where);
    for (const auto& y : l1) req.labels1.push_back(y.get<int>());
    for (const auto& y : l2) req.labels2.push_back(y.get<int>());
    req.epsilon = get_double(j, "epsilon", where);
  } else if (req.type == "overlap_fixture") {
    req.fixture_dim = get_int(j, "d", where);
    req.fixture_k = get_int(j, "k", where);
    req.fixture_n = get_int(j, "n", where);
    if (j.contains("knn_k")) req.knn_k = get_int(j, "knn_k", where);
  } else if (req.type == "knn_consistency" || req.type == "kernel_consistency") {
    req.spec = parse_synthetic(j, where);
    if (j.contains("predictor")) {
      req.predictor = parse_bayes(j["predictor"], where + " predictor");
    } else {
      req.predictor = req.spec.bayes;
      req.predictor_is_oracle = true;
    }
    const json& ladder = require(j, "ladder", where);
    if (!ladder.is_array() || ladder.empty())
      throw ValidationError("config: ladder must be a nonempty array in " + where);
    for (const auto& n : ladder) req.ladder.push_back(n.get<int>());
    if (j.contains("anchors")) req.anchors = get_int(j, "anchors", where);
    if (j.contains("kernel"))
      req.kernel_shape = parse_kernel_shape(get_string(j, "kernel", where), where);
  } else {
    throw ValidationError("config: unknown experiment type '" + req.type + "' in " +
                          where + " (see --list-scores)");
  }
  return req;
}

ScoreRequest parse_score(const json& j, std::size_t index) {
  ScoreRequest req;
  const std::string where = "scores[" + std::to_string(index) + "]";
  req.id = j.contains("id") ? get_string(j, "id", where) : "score_" + std::to_string(index);

  if (j.contains("preset")) {
    req.preset = get_string(j, "preset", where);
    if (req.preset == "ece" || req.preset == "ace" || req.preset == "mce") {
      req.scheme = parse_scheme(j, where);
    } else if (req.preset == "brier") {
      // no parameters
    } else if (req.preset == "brier_decomposition") {
      const std::string by = get_string(j, "by", where);
      if (by == "predictions") req.decomposition_key = LevelKey::Predictions;
      else if (by == "inputs") req.decomposition_key = LevelKey::Inputs;
      else throw ValidationError("config: by '" + by + "' in " + where);
    } else if (req.preset == "mlce") {
      req.kernel.shape = parse_kernel_shape(get_string(j, "shape", where), where);
      req.kernel.bandwidth = get_double(j, "bandwidth", where);
      req.scheme = parse_scheme(j, where);
      if (j.contains("absolute")) req.mlce_absolute = j["absolute"].get<bool>();
    } else {
      throw ValidationError("config: unknown preset '" + req.preset + "' in " + where +
                            " (see --list-scores)");
    }
    return req;
  }

  req.grouping = parse_grouping(require(j, "grouping", where), where + " grouping");
  req.signedness = parse_signedness(get_string(j, "signedness", where), where);
  if (j.contains("measure"))
    req.measure = parse_measure(get_string(j, "measure", where), where);
  req.agglomerator = parse_agglomerator(require(j, "agglomerator", where), where);
  return req;
}

// --------------------------------------------------------------------------
// Report serialization
// --------------------------------------------------------------------------

std::string hex64(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

json provenance_to_json(const Provenance& p) {
  json out;
  out["constructor"] = p.constructor;
  json params = json::object();
  for (const auto& [key, value] : p.params) params[key] = value;
  out["params"] = std::move(params);
  out["notes"] = p.notes;
  return out;
}

const char* signedness_name(Signedness s) {
  return s == Signedness::Signed ? "signed" : "absolute";
}

const char* measure_name(MeasureKind m) {
  switch (m) {
    case MeasureKind::Uniform: return "uniform";
    case MeasureKind::Empirical: return "empirical";
    case MeasureKind::Explicit: return "explicit";
  }
  return "?";
}

json score_to_json(const ScoreReport& report) {
  json out;
  out["name"] = report.name;
  out["value"] = report.value;
  out["signedness"] = signedness_name(report.signedness);
  out["measure"] = measure_name(report.measure);
  out["agglomerator"] = report.agglomerator;
  out["grouping"] = provenance_to_json(report.grouping);
  out["dataset"] = {{"n", report.dataset_size},
                    {"d", report.dataset_dim},
                    {"hash", hex64(report.dataset_hash)}};
  json rows = json::array();
  for (const auto& row : report.per_group) {
    rows.push_back({{"id", row.id},
                    {"size", row.size},
                    {"weight", row.weight},
                    {"signed_error", row.signed_error},
                    {"abs_error", row.abs_error}});
  }
  out["per_group"] = std::move(rows);
  return out;
}

json profile_to_json(const ErrorProfile& p) {
  json out;
  out["values"] = std::vector<double>(p.values.data(), p.values.data() + p.values.size());
  out["weights"] =
      std::vector<double>(p.weights.data(), p.weights.data() + p.weights.size());
  return out;
}

json axiom_report_to_json(const AxiomReport& report) {
  json out;
  out["seed"] = report.seed;
  out["trials"] = report.trials;
  out["tolerance"] = report.tolerance;
  out["all_pass"] = report.all_pass();
  json checks = json::array();
  for (const auto& check : report.checks) {
    json c;
    c["axiom"] = axiom_name(check.axiom);
    c["pass"] = check.pass;
    c["trials_run"] = check.trials_run;
    if (check.witness) {
      json w;
      w["detail"] = check.witness->detail;
      w["lhs"] = check.witness->lhs;
      w["rhs"] = check.witness->rhs;
      w["trial_seed"] = check.witness->trial_seed;
      w["profile"] = profile_to_json(check.witness->primary);
      if (check.witness->secondary)
        w["profile2"] = profile_to_json(*check.witness->secondary);
      c["witness"] = std::move(w);
    }
    checks.push_back(std::move(c));
  }
  out["checks"] = std::move(checks);
  return out;
}

json ladder_to_json(const ConsistencyLadder& ladder) {
  json out;
  out["schedule"] = ladder.schedule;
  json rungs = json::array();
  for (const auto& rung : ladder.rungs)
    rungs.push_back({{"n", rung.sample_size},
                     {"parameter", rung.parameter},
                     {"mean_abs_deviation", rung.mean_abs_deviation}});
  out["rungs"] = std::move(rungs);
  return out;
}

// --------------------------------------------------------------------------
// Execution
// --------------------------------------------------------------------------

Grouping build_grouping(const Dataset& data, const GroupingConfig& cfg,
                        MeasureKind measure) {
  Grouping grouping;
  if (cfg.type == "prediction_bins") grouping = prediction_bins(data, cfg.scheme);
  else if (cfg.type == "feature_grid") grouping = feature_grid(data, cfg.bins_per_dim);
  else if (cfg.type == "level_sets") grouping = level_set_groups(data, cfg.level_key);
  else if (cfg.type == "knn") grouping = knn_groups(data, cfg.k, cfg.metric, cfg.space);
  else if (cfg.type == "kernel") grouping = kernel_distributions(data, cfg.kernel, cfg.metric);
  else if (cfg.type == "mlce") grouping = mlce_groups(data, cfg.kernel, cfg.scheme, cfg.metric);
  else throw ValidationError("unknown grouping type '" + cfg.type + "'");
  grouping.measure = measure;
  return grouping;
}

json run_score(const Dataset& data, const ScoreRequest& req) {
  json out;
  out["id"] = req.id;
  if (req.preset == "brier") {
    out["name"] = "brier";
    out["value"] = brier(data);
    return out;
  }
  if (req.preset == "brier_decomposition") {
    const BrierDecomposition d = brier_decomposition(data, req.decomposition_key);
    out["name"] = "brier_decomposition";
    out["by"] = req.decomposition_key == LevelKey::Inputs ? "inputs" : "predictions";
    out["calibration"] = d.calibration;
    out["refinement"] = d.refinement;
    out["brier"] = brier(data);
    return out;
  }

  ScoreReport report;
  if (req.preset == "ece") report = ece(data, req.scheme);
  else if (req.preset == "ace") report = ace(data, req.scheme);
  else if (req.preset == "mce") report = mce(data, req.scheme);
  else if (req.preset == "mlce") report = mlce(data, req.kernel, req.scheme, req.mlce_absolute);
  else {
    const Grouping grouping = build_grouping(data, req.grouping, req.measure);
    report = global_score(data, grouping, req.signedness, *req.agglomerator, req.id);
  }
  json serialized = score_to_json(report);
  json with_id;
  with_id["id"] = req.id;
  for (auto& [key, value] : serialized.items()) with_id[key] = std::move(value);
  return with_id;
}

json run_experiment(const ExperimentRequest& req, std::uint64_t derived_seed) {
  json out;
  out["id"] = req.id;
  out["type"] = req.type;

  if (req.type == "axioms") {
    out["agglomerator"] = req.agglomerator->describe();
    const AxiomReport report =
        check_axioms(*req.agglomerator, req.axioms, req.trials, derived_seed, req.tolerance);
    out["report"] = axiom_report_to_json(report);
  } else if (req.type == "variance") {
    SyntheticSpec spec = req.spec;
    const VarianceResult result =
        variance_experiment(spec, req.predictor, req.group_size, req.resamples, derived_seed);
    out["bayes"] = spec.bayes.describe();
    out["predictor"] = req.predictor.describe();
    out["group_size"] = result.group_size;
    out["resamples"] = result.resamples;
    out["empirical_variance"] = result.empirical;
    out["theoretical_variance"] = result.theoretical;
    out["mean_p_one_minus_p"] = result.mean_p_one_minus_p;
  } else if (req.type == "resolution_fixture") {
    const ResolutionFixture fixture = resolution_fixture(req.labels1, req.labels2, req.epsilon);
    Group both;
    both.indices = fixture.first.indices;
    both.indices.insert(both.indices.end(), fixture.second.indices.begin(),
                        fixture.second.indices.end());
    out["epsilon"] = req.epsilon;
    out["union_error"] = group_error(fixture.data, both);
    out["first_error"] = group_error(fixture.data, fixture.first);
    out["second_error"] = group_error(fixture.data, fixture.second);
  } else if (req.type == "overlap_fixture") {
    const Eigen::MatrixXd points = overlap_fixture(req.fixture_dim, req.fixture_k, req.fixture_n);
    const auto n = points.rows();
    // The fixture geometry is stated in raw coordinates.
    const Dataset data = make_dataset(points, Eigen::VectorXd::Zero(n),
                                      Eigen::VectorXd::Constant(n, 0.5));
    const int k = req.knn_k > 0 ? req.knn_k : req.fixture_k;
    MetricSpec metric;
    metric.scaling = ScalingKind::None;
    const Grouping grouping = knn_groups(data, k, metric);
    const std::vector<int> counts = membership_counts(grouping);
    int max_count = 0, min_count = counts.empty() ? 0 : counts.front();
    for (int c : counts) {
      max_count = std::max(max_count, c);
      min_count = std::min(min_count, c);
    }
    out["d"] = req.fixture_dim;
    out["k"] = req.fixture_k;
    out["n"] = req.fixture_n;
    out["max_membership"] = max_count;
    out["min_membership"] = min_count;
  } else if (req.type == "knn_consistency" || req.type == "kernel_consistency") {
    SyntheticSpec spec = req.spec;
    spec.seed = derived_seed;
    const ConsistencyLadder ladder =
        req.type == "knn_consistency"
            ? knn_consistency(spec, req.predictor, req.ladder, {}, req.anchors)
            : kernel_consistency(spec, req.predictor, req.ladder, {}, req.kernel_shape,
                                 req.anchors);
    out["bayes"] = spec.bayes.describe();
    out["predictor"] = req.predictor_is_oracle ? "oracle" : req.predictor.describe();
    out["anchors"] = req.anchors;
    out["ladder"] = ladder_to_json(ladder);
  }
  return out;
}

json config_echo(const RunConfig& config) {
  json out;
  out["data"] = config.data_path;
  out["roles"] = {{"features", config.roles.features},
                  {"label", config.roles.label},
                  {"prediction", config.roles.prediction}};
  if (config.seed) out["seed"] = *config.seed;
  json scores = json::array();
  for (const auto& req : config.scores) {
    json s;
    s["id"] = req.id;
    if (!req.preset.empty()) {
      s["preset"] = req.preset;
    } else {
      s["grouping"] = req.grouping.type;
      s["signedness"] = signedness_name(req.signedness);
      s["measure"] = measure_name(req.measure);
      s["agglomerator"] = req.agglomerator->describe();
    }
    scores.push_back(std::move(s));
  }
  out["scores"] = std::move(scores);
  json experiments = json::array();
  for (const auto& req : config.experiments)
    experiments.push_back({{"id", req.id}, {"type", req.type}});
  out["experiments"] = std::move(experiments);
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config: document must be a JSON object");

  RunConfig config;
  config.data_path = get_string(doc, "data", "config");
  if (!base_dir.empty()) {
    std::filesystem::path p(config.data_path);
    if (p.is_relative()) config.data_path = (std::filesystem::path(base_dir) / p).string();
  }

  const json& roles = require(doc, "roles", "config");
  const json& features = require(roles, "features", "roles");
  if (!features.is_array() || features.empty())
    throw ValidationError("config: roles.features must be a nonempty array");
  for (const auto& f : features) config.roles.features.push_back(f.get<std::string>());
  config.roles.label = get_string(roles, "label", "roles");
  config.roles.prediction = get_string(roles, "prediction", "roles");

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer())
      throw ValidationError("config: seed must be an integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("out")) config.out_path = get_string(doc, "out", "config");

  if (doc.contains("scores")) {
    const json& scores = doc["scores"];
    if (!scores.is_array()) throw ValidationError("config: scores must be an array");
    for (std::size_t i = 0; i < scores.size(); ++i)
      config.scores.push_back(parse_score(scores[i], i));
  }
  if (doc.contains("experiments")) {
    const json& experiments = doc["experiments"];
    if (!experiments.is_array())
      throw ValidationError("config: experiments must be an array");
    for (std::size_t i = 0; i < experiments.size(); ++i)
      config.experiments.push_back(parse_experiment(experiments[i], i));
  }

  for (const auto& req : config.experiments)
    if (experiment_is_randomized(req.type) && !config.seed)
      throw ValidationError("config: a seed is required for randomized experiment '" +
                            req.id + "'");
  return config;
}

RunOutput run(const RunConfig& config) {
  const Dataset data = load_dataset(config.data_path, config.roles);

  json report;
  report["tool"] = "calkit";
  report["dataset"] = {{"path", config.data_path},
                       {"n", static_cast<std::int64_t>(data.size())},
                       {"d", static_cast<std::int64_t>(data.dim())},
                       {"hash", hex64(content_hash(data))}};
  if (config.seed) report["seed"] = *config.seed;
  report["config"] = config_echo(config);

  std::ostringstream human;
  human << "dataset: " << config.data_path << "  (n=" << data.size() << ", d=" << data.dim()
        << ", hash=" << hex64(content_hash(data)) << ")\n";

  json scores = json::array();
  for (const auto& req : config.scores) {
    try {
      json s = run_score(data, req);
      if (s.contains("value"))
        human << "score " << req.id << ": " << s["value"].dump() << "\n";
      else if (s.contains("calibration"))
        human << "score " << req.id << ": calibration=" << s["calibration"].dump()
              << " refinement=" << s["refinement"].dump() << "\n";
      scores.push_back(std::move(s));
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw ExecutionError("score request '" + req.id + "' failed: " + e.what());
    }
  }
  report["scores"] = std::move(scores);

  json experiments = json::array();
  const std::uint64_t master = config.seed.value_or(0);
  for (std::size_t i = 0; i < config.experiments.size(); ++i) {
    const auto& req = config.experiments[i];
    try {
      const std::uint64_t derived = Rng(master).fork(i).next_u64();
      json e = run_experiment(req, derived);
      human << "experiment " << req.id << " (" << req.type << ")";
      if (e.contains("report")) human << ": all_pass=" << e["report"]["all_pass"].dump();
      human << "\n";
      experiments.push_back(std::move(e));
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw ExecutionError("experiment request '" + req.id + "' failed: " + e.what());
    }
  }
  report["experiments"] = std::move(experiments);

  RunOutput out;
  out.report_json = report.dump(2) + "\n";
  out.human_text = human.str();
  return out;
}

std::string catalog_text() {
  std::ostringstream out;
  out << "groupings:\n"
      << "  prediction_bins   bins, mode=equal_width|equal_frequency\n"
      << "  feature_grid      bins_per_dim=[...]\n"
      << "  level_sets        by=predictions|inputs\n"
      << "  knn               k, space=features|predictions, metric{norm,scaling}\n"
      << "  kernel            shape, bandwidth, space, metric{norm,scaling}\n"
      << "  mlce              shape, bandwidth, bins, mode, metric{norm,scaling}\n"
      << "agglomerators:\n"
      << "  mean | max | cvar(alpha) | cvar_mixture(components)\n"
      << "  std_dev | range_dev | superquantile_dev(alpha)\n"
      << "  quadrangle_risk(inner) | quadrangle_dev(inner)\n"
      << "presets:\n"
      << "  ece | ace | mce     bins, mode\n"
      << "  brier\n"
      << "  brier_decomposition by=predictions|inputs\n"
      << "  mlce                shape, bandwidth, bins, mode [, absolute]\n"
      << "experiments:\n"
      << "  axioms              agglomerator, axioms=[A1..A7|aversity], trials, tolerance\n"
      << "  variance            bayes, predictor, group_size, resamples\n"
      << "  resolution_fixture  labels1, labels2, epsilon\n"
      << "  overlap_fixture     d, k, n [, knn_k]\n"
      << "  knn_consistency     bayes, predictor, ladder, anchors\n"
      << "  kernel_consistency  bayes, predictor, ladder, anchors, kernel\n";
  return out.str();
}

}  // namespace calkit
