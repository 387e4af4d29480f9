// Acceptance suite: every criterion runs at its stated tolerance and prints
// one pass/fail line. Exit status is the number of failed criteria.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "calkit/agglomerate.hpp"
#include "calkit/errors.hpp"
#include "calkit/grouping.hpp"
#include "calkit/io.hpp"
#include "calkit/run.hpp"
#include "calkit/scores.hpp"
#include "calkit/synthetic.hpp"
#include "helpers.hpp"

using namespace calkit;
using testutil::random_dataset;
using testutil::random_input_complete_group;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Independent brute-force oracles (no calkit grouping machinery).
// ---------------------------------------------------------------------------

struct BruteBins {
  std::vector<double> error_sums;  // sum of (prediction - label) per bin
  std::vector<int> counts;
};

BruteBins brute_equal_width_bins(const Dataset& data, int k) {
  BruteBins bins;
  bins.error_sums.assign(static_cast<std::size_t>(k), 0.0);
  bins.counts.assign(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double p = data.predictions[i];
    for (int j = 0; j < k; ++j) {
      const double lo = static_cast<double>(j) / k;
      const double hi = static_cast<double>(j + 1) / k;
      const bool inside = j + 1 == k ? (p >= lo && p <= 1.0) : (p >= lo && p < hi);
      if (inside) {
        bins.error_sums[static_cast<std::size_t>(j)] += p - data.labels[i];
        bins.counts[static_cast<std::size_t>(j)] += 1;
        break;
      }
    }
  }
  return bins;
}

double brute_ece(const Dataset& data, int k) {
  const BruteBins bins = brute_equal_width_bins(data, k);
  double out = 0.0;
  for (int j = 0; j < k; ++j)
    out += std::abs(bins.error_sums[static_cast<std::size_t>(j)]) /
           static_cast<double>(data.size());
  return out;
}

double brute_ace(const Dataset& data, int k) {
  const BruteBins bins = brute_equal_width_bins(data, k);
  double out = 0.0;
  int nonempty = 0;
  for (int j = 0; j < k; ++j) {
    if (bins.counts[static_cast<std::size_t>(j)] == 0) continue;
    out += std::abs(bins.error_sums[static_cast<std::size_t>(j)]) /
           bins.counts[static_cast<std::size_t>(j)];
    ++nonempty;
  }
  return out / nonempty;
}

double brute_mce(const Dataset& data, int k) {
  const BruteBins bins = brute_equal_width_bins(data, k);
  double out = 0.0;
  for (int j = 0; j < k; ++j)
    if (bins.counts[static_cast<std::size_t>(j)] > 0)
      out = std::max(out, std::abs(bins.error_sums[static_cast<std::size_t>(j)]) /
                              bins.counts[static_cast<std::size_t>(j)]);
  return out;
}

double brute_mean(const ErrorProfile& p) {
  double dot = 0.0, total = 0.0;
  for (Eigen::Index j = 0; j < p.values.size(); ++j) {
    dot += p.weights[j] * p.values[j];
    total += p.weights[j];
  }
  return dot / total;
}

double brute_max(const ErrorProfile& p) {
  double best = -1e300;
  for (Eigen::Index j = 0; j < p.values.size(); ++j)
    if (p.weights[j] > 0.0) best = std::max(best, p.values[j]);
  return best;
}

ErrorProfile random_profile(Rng& rng, int max_atoms = 16) {
  const int m = rng.uniform_int(2, max_atoms);
  Eigen::VectorXd values(m), weights(m);
  for (int j = 0; j < m; ++j) {
    values[j] = rng.uniform(-1.0, 1.0);
    weights[j] = rng.uniform(0.05, 1.0);
  }
  weights /= weights.sum();
  return make_profile(values, weights);
}

const AgglomerationFn average_of_squares = [](const ErrorProfile& p) {
  double total = 0.0, acc = 0.0;
  for (Eigen::Index j = 0; j < p.values.size(); ++j) {
    total += p.weights[j];
    acc += p.weights[j] * p.values[j] * p.values[j];
  }
  return acc / total;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

Outcome criterion_oracle_equivalence() {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset data = random_dataset(rng, rng.uniform_int(1, 100), rng.uniform_int(1, 3),
                                        /*with_duplicates=*/true);
    const int k = rng.uniform_int(1, 10);
    BinningScheme scheme;
    scheme.count = k;
    worst = std::max(worst, std::abs(ece(data, scheme).value - brute_ece(data, k)));
    worst = std::max(worst, std::abs(ace(data, scheme).value - brute_ace(data, k)));
    worst = std::max(worst, std::abs(mce(data, scheme).value - brute_mce(data, k)));
  }
  return {worst <= 1e-12, "200 datasets, max |diff| = " + fmt(worst) + " (tol 1e-12)"};
}

Outcome criterion_brier_identity() {
  Rng rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset data = random_dataset(rng, rng.uniform_int(2, 1000), rng.uniform_int(1, 3),
                                        /*with_duplicates=*/true);
    const double total = brier(data);
    for (LevelKey key : {LevelKey::Inputs, LevelKey::Predictions}) {
      const BrierDecomposition terms = brier_decomposition(data, key);
      const double gap = std::abs(terms.calibration + terms.refinement - total);
      worst = std::max(worst, gap / std::max(total, 1e-300));
    }
  }
  return {worst <= 1e-10,
          "200 datasets, both keys, max relative gap = " + fmt(worst) + " (tol 1e-10)"};
}

Outcome criterion_generalized_equivalence() {
  Rng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Dataset data = random_dataset(rng, rng.uniform_int(2, 60), rng.uniform_int(1, 3),
                                        /*with_duplicates=*/true);
    const Group group = random_input_complete_group(rng, data);
    worst = std::max(worst,
                     std::abs(group_error(data, group) -
                              generalized_error(data, uniform_distribution(data, group))));
  }
  return {worst <= 1e-12, "500 groups, max |diff| = " + fmt(worst) + " (tol 1e-12)"};
}

Outcome criterion_cvar_structure() {
  Rng rng(404);
  double worst_end = 0.0, worst_split = 0.0;
  bool monotone = true;
  for (int trial = 0; trial < 500; ++trial) {
    const ErrorProfile p = random_profile(rng);
    worst_end =
        std::max(worst_end, std::abs(apply(Agglomerator::cvar(0.0), p) - brute_mean(p)));
    worst_end =
        std::max(worst_end, std::abs(apply(Agglomerator::cvar(1.0), p) - brute_max(p)));

    double prev = -1e300;
    for (int g = 0; g <= 20; ++g) {
      const double value = apply(Agglomerator::cvar(static_cast<double>(g) / 20.0), p);
      if (value < prev - 1e-12) monotone = false;
      prev = value;
    }

    const int pick = rng.uniform_int(0, static_cast<int>(p.values.size()) - 1);
    const Eigen::Index m = p.values.size();
    Eigen::VectorXd values(m + 1), weights(m + 1);
    values.head(m) = p.values;
    weights.head(m) = p.weights;
    values[m] = p.values[pick];
    weights[pick] = p.weights[pick] / 2.0;
    weights[m] = p.weights[pick] / 2.0;
    const ErrorProfile split = make_profile(values, weights);
    for (double alpha : {0.25, 0.5, 0.9, rng.uniform()})
      worst_split = std::max(worst_split, std::abs(apply(Agglomerator::cvar(alpha), split) -
                                                   apply(Agglomerator::cvar(alpha), p)));
  }
  const bool pass = worst_end <= 1e-12 && monotone && worst_split <= 1e-12;
  return {pass, "500 profiles: endpoint gap " + fmt(worst_end) + ", split gap " +
                    fmt(worst_split) + ", 21-point grid " +
                    (monotone ? "nondecreasing" : "NOT monotone") + " (tol 1e-12)"};
}

Outcome criterion_axiom_suite() {
  const std::vector<Axiom> crm = {Axiom::Monotonicity, Axiom::TranslationEquivariance,
                                  Axiom::PositiveHomogeneity, Axiom::Subadditivity,
                                  Axiom::LawInvariance};
  const std::vector<Axiom> fdm = {Axiom::PositiveHomogeneity, Axiom::Subadditivity,
                                  Axiom::LawInvariance, Axiom::Normalisation};
  std::string failures;

  const std::vector<Agglomerator> crms = {
      Agglomerator::mean(), Agglomerator::max(), Agglomerator::cvar(0.25),
      Agglomerator::cvar(0.5), Agglomerator::cvar(0.9),
      Agglomerator::cvar_mixture({{0.1, 0.2}, {0.5, 0.5}, {0.9, 0.3}})};
  for (const auto& agg : crms)
    if (!check_axioms(agg, crm, 1000, 1001, 1e-9).all_pass())
      failures += " " + agg.describe();

  const std::vector<Agglomerator> fdms = {Agglomerator::std_dev(), Agglomerator::range_dev(),
                                          Agglomerator::superquantile_dev(0.5)};
  for (const auto& agg : fdms)
    if (!check_axioms(agg, fdm, 1000, 1002, 1e-9).all_pass())
      failures += " " + agg.describe();

  const AxiomReport double_report = check_axioms(
      average_of_squares, {Axiom::TranslationEquivariance, Axiom::PositiveHomogeneity},
      1000, 1003, 1e-9);
  bool double_fails_with_witnesses = true;
  for (const auto& check : double_report.checks)
    if (check.pass || !check.witness ||
        !(std::abs(check.witness->lhs - check.witness->rhs) > 1e-9))
      double_fails_with_witnesses = false;
  if (!double_fails_with_witnesses) failures += " average_of_squares(double)";

  return {failures.empty(),
          failures.empty()
              ? "6 CRMs pass A1-A5, 3 FDMs pass A3-A6, test double fails A2+A3 with "
                "witnesses (1000 trials, tol 1e-9)"
              : "failing:" + failures};
}

Outcome criterion_quadrangle() {
  const Agglomerator sqd = Agglomerator::superquantile_dev(0.5);
  const Agglomerator risk = Agglomerator::quadrangle_risk(sqd);
  const std::vector<Axiom> axioms = {Axiom::TranslationEquivariance,
                                     Axiom::PositiveHomogeneity, Axiom::Subadditivity,
                                     Axiom::LawInvariance, Axiom::Aversity};
  const bool risk_ok = check_axioms(risk, axioms, 1000, 2001, 1e-9).all_pass();

  const Agglomerator recovered = Agglomerator::quadrangle_dev(risk);
  Rng rng(2002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ErrorProfile p = random_profile(rng);
    worst = std::max(worst, std::abs(apply(recovered, p) - apply(sqd, p)));
  }
  const bool pass = risk_ok && worst <= 1e-9;
  return {pass, std::string(risk_ok ? "risk passes A2-A5+aversity" : "risk FAILS axioms") +
                    ", recovery gap " + fmt(worst) + " on 100 profiles (tol 1e-9)"};
}

Outcome criterion_range_dev_boundary() {
  Eigen::VectorXd values(2), weights(2);
  values << 0.0, 1.0;
  weights << 0.5, 0.5;
  const ErrorProfile witness = make_profile(values, weights);
  const double dev = apply(Agglomerator::range_dev(), witness);
  const double sup = apply(Agglomerator::max(), witness);
  const double mean = apply(Agglomerator::mean(), witness);
  const bool pass = dev > sup - mean;
  return {pass, "witness {0,1}x{0.5,0.5}: range_dev = " + fmt(dev) +
                    " > sup - mean = " + fmt(sup - mean)};
}

Outcome criterion_refinement_monotonicity() {
  Rng rng(505);
  const std::vector<Agglomerator> aggs = {Agglomerator::mean(), Agglomerator::cvar(0.5),
                                          Agglomerator::max()};
  double worst_drop = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(4, 50);
    const Dataset data = random_dataset(rng, n, 1);

    std::vector<std::vector<int>> cells(static_cast<std::size_t>(rng.uniform_int(1, 4)));
    for (int i = 0; i < n; ++i)
      cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(cells.size()) - 1))]
          .push_back(i);
    cells.erase(std::remove_if(cells.begin(), cells.end(),
                               [](const auto& c) { return c.empty(); }),
                cells.end());
    std::vector<std::vector<int>> split;
    for (auto& cell : cells) {
      if (cell.size() > 1 && rng.bernoulli(0.7)) {
        const auto cut =
            static_cast<std::size_t>(rng.uniform_int(1, static_cast<int>(cell.size()) - 1));
        split.emplace_back(cell.begin(), cell.begin() + static_cast<long>(cut));
        split.emplace_back(cell.begin() + static_cast<long>(cut), cell.end());
      } else {
        split.push_back(cell);
      }
    }
    Grouping coarser, finer;
    coarser.kind = finer.kind = GroupingKind::Partition;
    coarser.universe = finer.universe = n;
    for (auto& cell : cells) {
      Group g;
      g.indices = cell;
      coarser.groups.push_back(std::move(g));
    }
    for (auto& cell : split) {
      Group g;
      g.indices = cell;
      finer.groups.push_back(std::move(g));
    }
    for (const auto& agg : aggs)
      for (Signedness s : {Signedness::Signed, Signedness::Absolute}) {
        const RefinementVerdict verdict =
            check_refinement_monotonicity(agg, data, finer, coarser, s, 1e-9);
        worst_drop = std::max(worst_drop, verdict.coarser_score - verdict.finer_score);
        if (!verdict.holds)
          return {false, "drop of " + fmt(verdict.coarser_score - verdict.finer_score) +
                             " under " + agg.describe()};
      }
  }
  return {true, "200 triples x {mean, cvar(0.5), max} x {signed, absolute}, worst drop " +
                    fmt(worst_drop) + " (tol 1e-9)"};
}

Outcome criterion_resolution_and_mixing() {
  Rng rng(606);
  double worst_union = 0.0;
  bool nonzero = true;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> labels1, labels2;
    const int n1 = rng.uniform_int(1, 10), n2 = rng.uniform_int(1, 10);
    for (int i = 0; i < n1; ++i) labels1.push_back(rng.bernoulli(0.5) ? 1 : 0);
    for (int i = 0; i < n2; ++i) labels2.push_back(rng.bernoulli(0.5) ? 1 : 0);
    const int total = std::accumulate(labels1.begin(), labels1.end(), 0) +
                      std::accumulate(labels2.begin(), labels2.end(), 0);
    if (total == 0) labels1.front() = 1;
    if (total == n1 + n2) labels1.front() = 0;

    const double sum = static_cast<double>(
        std::accumulate(labels1.begin(), labels1.end(), 0) +
        std::accumulate(labels2.begin(), labels2.end(), 0));
    const double n = static_cast<double>(n1 + n2);
    const double z = sum / n;
    const double cap = std::min(z * n / n1, (1.0 - z) * n / n2);
    const ResolutionFixture fixture = resolution_fixture(labels1, labels2, 0.8 * cap);

    Group both;
    both.indices = fixture.first.indices;
    both.indices.insert(both.indices.end(), fixture.second.indices.begin(),
                        fixture.second.indices.end());
    worst_union = std::max(worst_union, std::abs(group_error(fixture.data, both)));
    if (std::abs(group_error(fixture.data, fixture.first)) <= 0.0) nonzero = false;
    if (std::abs(group_error(fixture.data, fixture.second)) <= 0.0) nonzero = false;
  }

  double worst_mix = 0.0;
  Rng mix_rng(607);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = mix_rng.uniform_int(4, 50);
    const Dataset data = random_dataset(mix_rng, n, 1);
    Group a, b;
    for (int i = 0; i < n; ++i) {
      const int coin = mix_rng.uniform_int(0, 2);
      if (coin == 0) a.indices.push_back(i);
      else if (coin == 1) b.indices.push_back(i);
    }
    if (a.indices.empty() || b.indices.empty()) continue;
    Group both;
    both.indices = a.indices;
    both.indices.insert(both.indices.end(), b.indices.begin(), b.indices.end());
    std::sort(both.indices.begin(), both.indices.end());
    const double na = static_cast<double>(a.indices.size());
    const double nb = static_cast<double>(b.indices.size());
    const double bound =
        (na * std::abs(group_error(data, a)) + nb * std::abs(group_error(data, b))) /
        (na + nb);
    worst_mix = std::max(worst_mix, std::abs(group_error(data, both)) - bound);
  }

  const bool pass = worst_union <= 1e-12 && nonzero && worst_mix <= 1e-12;
  return {pass, "50 fixtures: max |c(union)| = " + fmt(worst_union) +
                    (nonzero ? ", subgroup errors nonzero" : ", subgroup error VANISHED") +
                    "; 500 pairs: mixing excess " + fmt(worst_mix) + " (tol 1e-12)"};
}

Outcome criterion_variance_law() {
  SyntheticSpec spec;
  spec.dimension = 1;
  spec.law = FeatureLaw::Uniform01;
  spec.bayes.family = BayesFamily::Constant;
  spec.bayes.value = 0.5;

  const BayesFunction predictor = spec.bayes;
  const VarianceResult r25 = variance_experiment(spec, predictor, 25, 10000, 4040);
  const VarianceResult r50 = variance_experiment(spec, predictor, 50, 10000, 4040);

  const double rel = std::abs(r25.empirical - 0.01) / 0.01;
  const bool halved = r50.theoretical == r25.theoretical / 2.0;
  const bool pass = r25.theoretical == 0.01 && rel <= 0.10 && halved;
  return {pass, "empirical " + fmt(r25.empirical) + " vs 0.01 (rel " + fmt(rel) +
                    ", tol 10%), theoretical halves exactly: " + (halved ? "yes" : "NO")};
}

Outcome criterion_overlap() {
  MetricSpec metric;
  metric.scaling = ScalingKind::None;
  for (int d = 1; d <= 3; ++d)
    for (int k = 2; k <= 5; ++k) {
      const int base = 2 * d * (k - 1) + 1;
      for (int n : {base, base + 3}) {
        const Eigen::MatrixXd points = overlap_fixture(d, k, n);
        const Dataset data = make_dataset(points, Eigen::VectorXd::Zero(n),
                                          Eigen::VectorXd::Constant(n, 0.5));
        const auto counts = membership_counts(knn_groups(data, k, metric));
        const int max_count = *std::max_element(counts.begin(), counts.end());
        const int min_count = *std::min_element(counts.begin(), counts.end());
        if (max_count != base)
          return {false, "d=" + std::to_string(d) + " k=" + std::to_string(k) +
                             " N=" + std::to_string(n) + ": max membership " +
                             std::to_string(max_count) + ", expected " +
                             std::to_string(base)};
        if (n == base && min_count != 1)
          return {false, "d=" + std::to_string(d) + " k=" + std::to_string(k) +
                             " N=" + std::to_string(n) + ": min membership " +
                             std::to_string(min_count) + ", expected 1"};
      }
    }
  return {true, "(d,k) in {1,2,3}x{2,3,4,5}, N in {2d(k-1)+1, 2d(k-1)+4}: max = "
                "min(N, 2d(k-1)+1), min = 1 at base size"};
}

Outcome criterion_consistency() {
  SyntheticSpec spec;
  spec.dimension = 1;
  spec.law = FeatureLaw::Uniform01;
  spec.bayes.family = BayesFamily::LinearClipped;
  spec.bayes.slope = Eigen::VectorXd::Ones(1);
  spec.bayes.intercept = 0.0;
  spec.seed = 1212;

  BayesFunction predictor;
  predictor.family = BayesFamily::LinearClipped;
  predictor.slope = Eigen::VectorXd::Ones(1);
  predictor.intercept = 0.1;

  const std::vector<int> ladder = {200, 2000, 20000};

  const auto timed = [&](auto&& build) {
    const auto start = std::chrono::steady_clock::now();
    ConsistencyLadder result = build();
    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::pair<ConsistencyLadder, double>(std::move(result), elapsed);
  };

  const auto [knn, knn_seconds] =
      timed([&] { return knn_consistency(spec, predictor, ladder); });
  const auto [kernel, kernel_seconds] =
      timed([&] { return kernel_consistency(spec, predictor, ladder); });

  auto ladder_ok = [](const ConsistencyLadder& l, std::string& why) {
    for (std::size_t r = 1; r < l.rungs.size(); ++r)
      if (l.rungs[r].mean_abs_deviation > 1.2 * l.rungs[r - 1].mean_abs_deviation) {
        why = "rung " + std::to_string(r) + " exceeds 1.2x previous";
        return false;
      }
    if (!(l.rungs.back().mean_abs_deviation < 0.5 * l.rungs.front().mean_abs_deviation)) {
      why = "final rung not below half the first";
      return false;
    }
    return true;
  };

  std::string why_knn, why_kernel;
  const bool knn_ok = ladder_ok(knn, why_knn) && knn_seconds < 60.0;
  const bool kernel_ok = ladder_ok(kernel, why_kernel) && kernel_seconds < 60.0;

  std::ostringstream detail;
  detail << "knn devs";
  for (const auto& r : knn.rungs) detail << " " << fmt(r.mean_abs_deviation);
  detail << " (" << fmt(knn_seconds) << "s)";
  if (!knn_ok) detail << " FAIL " << why_knn;
  detail << "; kernel devs";
  for (const auto& r : kernel.rungs) detail << " " << fmt(r.mean_abs_deviation);
  detail << " (" << fmt(kernel_seconds) << "s)";
  if (!kernel_ok) detail << " FAIL " << why_kernel;
  return {knn_ok && kernel_ok, detail.str()};
}

Outcome criterion_cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "calkit_acceptance";
  fs::create_directories(dir);
  const fs::path config = fs::path(CALKIT_DATA_DIR) / "example_config.json";
  const fs::path out1 = dir / "acc_report_1.json";
  const fs::path out2 = dir / "acc_report_2.json";

  auto invoke = [&](const fs::path& out) {
    const std::string command = std::string(CALKIT_CLI_PATH) + " --config " +
                                config.string() + " --out " + out.string() +
                                " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(command.c_str()));
  };
  if (invoke(out1) != 0 || invoke(out2) != 0) return {false, "cli invocation failed"};

  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const std::string a = slurp(out1), b = slurp(out2);
  if (a.empty() || a != b) return {false, "reports are not byte-identical"};

  const auto report = nlohmann::json::parse(a);
  double ece_value = -1.0;
  for (const auto& score : report["scores"])
    if (score["id"] == "ece2") ece_value = score["value"].get<double>();
  const bool ece_ok = std::abs(ece_value - 0.25) <= 1e-12;
  return {ece_ok, std::string("byte-identical reports; embedded ECE = ") + fmt(ece_value) +
                      (ece_ok ? "" : " != 0.25")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence (ece/ace/mce vs brute force)", criterion_oracle_equivalence},
      {"brier identity (calibration + refinement)", criterion_brier_identity},
      {"generalized error equals group error on uniform distributions",
       criterion_generalized_equivalence},
      {"cvar endpoints, monotonicity, atom splitting", criterion_cvar_structure},
      {"axiom suite (CRMs, FDMs, failing test double)", criterion_axiom_suite},
      {"quadrangle risk/deviation correspondence", criterion_quadrangle},
      {"range_dev exceeds the risk-inducing bound", criterion_range_dev_boundary},
      {"refinement monotonicity", criterion_refinement_monotonicity},
      {"resolution fixture and mixing bound", criterion_resolution_and_mixing},
      {"group-size variance law", criterion_variance_law},
      {"knn membership overlap", criterion_overlap},
      {"knn/kernel consistency ladders", criterion_consistency},
      {"cli determinism and fixture ece", criterion_cli_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] criterion %2zu: %s - %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), outcome.detail.c_str());
  }
  if (failures == 0)
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  else
    std::printf("%d of %zu acceptance criteria FAILED\n", failures, criteria.size());
  return failures;
}
