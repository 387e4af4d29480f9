#include "calkit/agglomerate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "calkit/grouping.hpp"
#include "calkit/rng.hpp"

namespace calkit {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Support of a profile (atoms with positive weight), sorted by value, with
// the normalized cumulative distribution. The final cumulative is pinned to
// one so that quantiles at t = 1 and tail integrals are well defined under
// the kWeightTolerance slack on the weight sum.
struct SupportView {
  std::vector<double> values;
  std::vector<double> cum;
};

SupportView support_view(const ErrorProfile& profile) {
  std::vector<std::pair<double, double>> atoms;
  double total = 0.0;
  for (Eigen::Index j = 0; j < profile.values.size(); ++j) {
    const double w = profile.weights[j];
    if (w > 0.0) {
      atoms.emplace_back(profile.values[j], w);
      total += w;
    }
  }
  if (atoms.empty())
    throw std::invalid_argument("agglomerate: profile has empty support");
  std::sort(atoms.begin(), atoms.end());

  SupportView view;
  view.values.reserve(atoms.size());
  view.cum.reserve(atoms.size());
  double running = 0.0;
  for (const auto& [v, w] : atoms) {
    running += w;
    view.values.push_back(v);
    view.cum.push_back(running / total);
  }
  view.cum.back() = 1.0;
  return view;
}

double weighted_mean(const ErrorProfile& profile) {
  double total = 0.0, dot = 0.0;
  for (Eigen::Index j = 0; j < profile.values.size(); ++j) {
    total += profile.weights[j];
    dot += profile.weights[j] * profile.values[j];
  }
  return dot / total;
}

// Exact tail integral (1/(1-alpha)) * int_alpha^1 Q(t) dt over the sorted
// step function. The endpoints reduce to the mean and the maximum exactly.
double cvar_from_view(const SupportView& view, double alpha) {
  if (alpha == 1.0) return view.values.back();
  double integral = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < view.values.size(); ++j) {
    const double hi = std::min(view.cum[j], 1.0);
    const double lo = std::max(prev, alpha);
    if (hi > lo) integral += view.values[j] * (hi - lo);
    prev = view.cum[j];
  }
  return integral / (1.0 - alpha);
}

void check_alpha(double alpha, const char* what) {
  if (!(alpha >= 0.0) || !(alpha <= 1.0))
    throw std::invalid_argument(std::string(what) + ": alpha must lie in [0, 1]");
}

void check_mixture(const std::vector<std::pair<double, double>>& mixture) {
  if (mixture.empty())
    throw std::invalid_argument("cvar_mixture: needs at least one component");
  double total = 0.0;
  for (const auto& [alpha, weight] : mixture) {
    check_alpha(alpha, "cvar_mixture");
    if (!(weight >= 0.0) || !std::isfinite(weight))
      throw std::invalid_argument("cvar_mixture: component weights must be nonnegative");
    total += weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw std::invalid_argument("cvar_mixture: component weights must sum to 1");
}

}  // namespace

Agglomerator Agglomerator::mean() { return {AgglomeratorKind::Mean, 0.0, {}, nullptr}; }
Agglomerator Agglomerator::max() { return {AgglomeratorKind::Max, 0.0, {}, nullptr}; }

Agglomerator Agglomerator::cvar(double alpha) {
  check_alpha(alpha, "cvar");
  return {AgglomeratorKind::CVaR, alpha, {}, nullptr};
}

Agglomerator Agglomerator::cvar_mixture(std::vector<std::pair<double, double>> components) {
  check_mixture(components);
  return {AgglomeratorKind::CVaRMixture, 0.0, std::move(components), nullptr};
}

Agglomerator Agglomerator::std_dev() { return {AgglomeratorKind::StdDev, 0.0, {}, nullptr}; }
Agglomerator Agglomerator::range_dev() { return {AgglomeratorKind::RangeDev, 0.0, {}, nullptr}; }

Agglomerator Agglomerator::superquantile_dev(double alpha) {
  check_alpha(alpha, "superquantile_dev");
  if (alpha == 0.0)
    throw std::invalid_argument("superquantile_dev: requires alpha > 0");
  return {AgglomeratorKind::SuperquantileDev, alpha, {}, nullptr};
}

Agglomerator Agglomerator::quadrangle_risk(Agglomerator inner_deviation) {
  return {AgglomeratorKind::QuadrangleRisk, 0.0, {},
          std::make_shared<const Agglomerator>(std::move(inner_deviation))};
}

Agglomerator Agglomerator::quadrangle_dev(Agglomerator inner_risk) {
  return {AgglomeratorKind::QuadrangleDev, 0.0, {},
          std::make_shared<const Agglomerator>(std::move(inner_risk))};
}

std::string Agglomerator::describe() const {
  switch (kind) {
    case AgglomeratorKind::Mean: return "mean";
    case AgglomeratorKind::Max: return "max";
    case AgglomeratorKind::CVaR: return "cvar(" + fmt(alpha) + ")";
    case AgglomeratorKind::CVaRMixture: {
      std::string out = "cvar_mixture([";
      for (std::size_t m = 0; m < mixture.size(); ++m)
        out += (m ? "," : "") + ("(" + fmt(mixture[m].first) + "," +
                                 fmt(mixture[m].second) + ")");
      return out + "])";
    }
    case AgglomeratorKind::StdDev: return "std_dev";
    case AgglomeratorKind::RangeDev: return "range_dev";
    case AgglomeratorKind::SuperquantileDev:
      return "superquantile_dev(" + fmt(alpha) + ")";
    case AgglomeratorKind::QuadrangleRisk:
      return "quadrangle_risk(" + (inner ? inner->describe() : "?") + ")";
    case AgglomeratorKind::QuadrangleDev:
      return "quadrangle_dev(" + (inner ? inner->describe() : "?") + ")";
  }
  return "?";
}

double quantile(const ErrorProfile& profile, double t) {
  if (!(t >= 0.0) || !(t <= 1.0))
    throw std::invalid_argument("quantile: t must lie in [0, 1]");
  const SupportView view = support_view(profile);
  if (t == 1.0) return view.values.back();
  for (std::size_t j = 0; j < view.cum.size(); ++j)
    if (view.cum[j] >= t) return view.values[j];
  return view.values.back();
}

double apply(const Agglomerator& agg, const ErrorProfile& profile) {
  switch (agg.kind) {
    case AgglomeratorKind::Mean:
      return weighted_mean(profile);
    case AgglomeratorKind::Max:
      return support_view(profile).values.back();
    case AgglomeratorKind::CVaR: {
      check_alpha(agg.alpha, "cvar");
      if (agg.alpha == 0.0) return weighted_mean(profile);
      return cvar_from_view(support_view(profile), agg.alpha);
    }
    case AgglomeratorKind::CVaRMixture: {
      check_mixture(agg.mixture);
      const SupportView view = support_view(profile);
      const double mean = weighted_mean(profile);
      double out = 0.0;
      for (const auto& [alpha, weight] : agg.mixture)
        out += weight * (alpha == 0.0 ? mean : cvar_from_view(view, alpha));
      return out;
    }
    case AgglomeratorKind::StdDev: {
      const double mean = weighted_mean(profile);
      double total = 0.0, acc = 0.0;
      for (Eigen::Index j = 0; j < profile.values.size(); ++j) {
        const double d = profile.values[j] - mean;
        acc += profile.weights[j] * d * d;
        total += profile.weights[j];
      }
      return std::sqrt(acc / total);
    }
    case AgglomeratorKind::RangeDev: {
      const SupportView view = support_view(profile);
      return view.values.back() - view.values.front();
    }
    case AgglomeratorKind::SuperquantileDev: {
      check_alpha(agg.alpha, "superquantile_dev");
      if (agg.alpha == 0.0)
        throw std::invalid_argument("superquantile_dev: requires alpha > 0");
      const double mean = weighted_mean(profile);
      SupportView view = support_view(profile);
      for (double& v : view.values) v -= mean;
      return cvar_from_view(view, agg.alpha);
    }
    case AgglomeratorKind::QuadrangleRisk: {
      if (!agg.inner) throw std::invalid_argument("quadrangle_risk: missing inner");
      return weighted_mean(profile) + apply(*agg.inner, profile);
    }
    case AgglomeratorKind::QuadrangleDev: {
      if (!agg.inner) throw std::invalid_argument("quadrangle_dev: missing inner");
      return apply(*agg.inner, profile) - weighted_mean(profile);
    }
  }
  throw std::invalid_argument("apply: unknown agglomerator");
}

// ---------------------------------------------------------------------------
// Axiom harness
// ---------------------------------------------------------------------------

std::string axiom_name(Axiom axiom) {
  switch (axiom) {
    case Axiom::Monotonicity: return "A1";
    case Axiom::TranslationEquivariance: return "A2";
    case Axiom::PositiveHomogeneity: return "A3";
    case Axiom::Subadditivity: return "A4";
    case Axiom::LawInvariance: return "A5";
    case Axiom::Normalisation: return "A6";
    case Axiom::Agreement: return "A7";
    case Axiom::Aversity: return "aversity";
  }
  return "?";
}

bool AxiomReport::all_pass() const {
  for (const auto& check : checks)
    if (!check.pass) return false;
  return true;
}

const AxiomCheck* AxiomReport::find(Axiom axiom) const {
  for (const auto& check : checks)
    if (check.axiom == axiom) return &check;
  return nullptr;
}

namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (0x9e3779b97f4a7c15ULL * (b + 1)));
  return r.next_u64();
}

ErrorProfile random_profile(Rng& rng, bool equal_weights, bool ensure_spread) {
  const int m = rng.uniform_int(2, 12);
  Eigen::VectorXd values(m), weights(m);
  for (int j = 0; j < m; ++j) values[j] = rng.uniform(-1.0, 1.0);
  if (ensure_spread && values.maxCoeff() - values.minCoeff() < 0.1) {
    values[0] -= 0.3;
    values[m - 1] += 0.3;
  }
  if (equal_weights) {
    weights.setConstant(1.0 / static_cast<double>(m));
  } else {
    for (int j = 0; j < m; ++j) weights[j] = rng.uniform(0.05, 1.0);
    weights /= weights.sum();
  }
  return make_profile(std::move(values), std::move(weights));
}

// Hand-built adversarial profiles fed in ahead of the random stream.
std::vector<ErrorProfile> fixture_profiles() {
  std::vector<ErrorProfile> fixtures;
  fixtures.push_back(make_profile((Eigen::VectorXd(2) << -1.0, 1.0).finished(),
                                  (Eigen::VectorXd(2) << 0.5, 0.5).finished()));
  fixtures.push_back(make_profile((Eigen::VectorXd(3) << 0.1, 0.2, 0.7).finished(),
                                  (Eigen::VectorXd(3) << 0.7, 0.2, 0.1).finished()));
  fixtures.push_back(make_profile((Eigen::VectorXd(3) << -0.5, -0.5, 0.25).finished(),
                                  (Eigen::VectorXd(3) << 0.25, 0.25, 0.5).finished()));
  return fixtures;
}

ErrorProfile trial_profile(const std::vector<ErrorProfile>& fixtures, Rng& rng, int t,
                           bool equal_weights, bool ensure_spread) {
  if (t < static_cast<int>(fixtures.size())) {
    ErrorProfile p = fixtures[static_cast<std::size_t>(t)];
    if (equal_weights)
      p.weights.setConstant(1.0 / static_cast<double>(p.values.size()));
    return p;
  }
  return random_profile(rng, equal_weights, ensure_spread);
}

ErrorProfile shifted(const ErrorProfile& p, double a) {
  return make_profile(p.values.array() + a, p.weights, p.signedness);
}

ErrorProfile scaled(const ErrorProfile& p, double mu) {
  return make_profile(p.values * mu, p.weights, p.signedness);
}

ErrorProfile constant_like(const ErrorProfile& p, double value) {
  return make_profile(Eigen::VectorXd::Constant(p.values.size(), value), p.weights,
                      p.signedness);
}

struct TrialOutcome {
  bool pass = true;
  AxiomWitness witness;
};

TrialOutcome run_trial(const AgglomerationFn& fn, Axiom axiom, Rng& rng, int t,
                       const std::vector<ErrorProfile>& fixtures, double tol) {
  TrialOutcome out;
  auto fail = [&](const ErrorProfile& primary, std::optional<ErrorProfile> secondary,
                  double lhs, double rhs, std::string detail) {
    out.pass = false;
    out.witness.primary = primary;
    out.witness.secondary = std::move(secondary);
    out.witness.lhs = lhs;
    out.witness.rhs = rhs;
    out.witness.detail = std::move(detail);
  };

  switch (axiom) {
    case Axiom::Monotonicity: {
      const ErrorProfile c = trial_profile(fixtures, rng, t, false, false);
      Eigen::VectorXd bumped = c.values;
      for (Eigen::Index j = 0; j < bumped.size(); ++j) bumped[j] += rng.uniform(0.0, 0.5);
      const ErrorProfile c2 = make_profile(bumped, c.weights);
      const double lhs = fn(c), rhs = fn(c2);
      if (lhs > rhs + tol) fail(c, c2, lhs, rhs, "R(C) > R(C') for C <= C' pointwise");
      break;
    }
    case Axiom::TranslationEquivariance: {
      const ErrorProfile c = trial_profile(fixtures, rng, t, false, false);
      const double a = rng.uniform(-1.0, 1.0);
      const double lhs = fn(shifted(c, a)), rhs = fn(c) + a;
      if (std::abs(lhs - rhs) > tol)
        fail(c, std::nullopt, lhs, rhs, "R(C + " + fmt(a) + ") != R(C) + " + fmt(a));
      break;
    }
    case Axiom::PositiveHomogeneity: {
      const ErrorProfile c = trial_profile(fixtures, rng, t, false, false);
      if (t == 0) {
        const ErrorProfile zero = constant_like(c, 0.0);
        const double r0 = fn(zero);
        if (std::abs(r0) > tol) {
          fail(zero, std::nullopt, r0, 0.0, "R(0) != 0");
          break;
        }
      }
      const double mu = rng.uniform(0.01, 3.0);
      const double lhs = fn(scaled(c, mu)), rhs = mu * fn(c);
      if (std::abs(lhs - rhs) > tol)
        fail(c, std::nullopt, lhs, rhs, "R(" + fmt(mu) + " C) != " + fmt(mu) + " R(C)");
      break;
    }
    case Axiom::Subadditivity: {
      const ErrorProfile c = trial_profile(fixtures, rng, t, false, false);
      Eigen::VectorXd other(c.values.size());
      for (Eigen::Index j = 0; j < other.size(); ++j) other[j] = rng.uniform(-1.0, 1.0);
      const ErrorProfile c2 = make_profile(other, c.weights);
      const ErrorProfile sum = make_profile(c.values + c2.values, c.weights);
      const double lhs = fn(sum), rhs = fn(c) + fn(c2);
      if (lhs > rhs + tol) fail(c, c2, lhs, rhs, "R(C + C') > R(C) + R(C')");
      break;
    }
    case Axiom::LawInvariance: {
      // (i) permutations of equal-weight profiles
      const ErrorProfile c = trial_profile(fixtures, rng, t, true, false);
      Eigen::VectorXd permuted = c.values;
      for (Eigen::Index j = permuted.size() - 1; j > 0; --j)
        std::swap(permuted[j], permuted[rng.uniform_int(0, static_cast<int>(j))]);
      const ErrorProfile cp = make_profile(permuted, c.weights);
      double lhs = fn(cp), rhs = fn(c);
      if (std::abs(lhs - rhs) > tol) {
        fail(c, cp, lhs, rhs, "not permutation-invariant");
        break;
      }
      // (ii) splitting one atom into two equal-weight copies of its value
      const ErrorProfile g = trial_profile(fixtures, rng, t, false, false);
      const int pick = rng.uniform_int(0, static_cast<int>(g.values.size()) - 1);
      const Eigen::Index m = g.values.size();
      Eigen::VectorXd values(m + 1), weights(m + 1);
      values.head(m) = g.values;
      weights.head(m) = g.weights;
      values[m] = g.values[pick];
      weights[pick] = g.weights[pick] / 2.0;
      weights[m] = g.weights[pick] / 2.0;
      const ErrorProfile split = make_profile(values, weights);
      lhs = fn(split);
      rhs = fn(g);
      if (std::abs(lhs - rhs) > tol) fail(g, split, lhs, rhs, "not atom-split invariant");
      break;
    }
    case Axiom::Normalisation: {
      const ErrorProfile c = trial_profile(fixtures, rng, t, false, true);
      const double d = fn(c);
      if (d < -tol) {
        fail(c, std::nullopt, d, 0.0, "D(C) < 0");
        break;
      }
      if (d <= tol) {
        fail(c, std::nullopt, d, 0.0, "D(C) = 0 on a non-constant profile");
        break;
      }
      const ErrorProfile flat = constant_like(c, rng.uniform(-1.0, 1.0));
      const double dz = fn(flat);
      if (std::abs(dz) > tol) fail(flat, std::nullopt, dz, 0.0, "D != 0 on a constant profile");
      break;
    }
    case Axiom::Agreement: {
      const ErrorProfile c = trial_profile(fixtures, rng, t, false, false);
      const double a = rng.uniform(-1.0, 1.0);
      const ErrorProfile flat = constant_like(c, a);
      const double lhs = fn(flat);
      if (std::abs(lhs - a) > tol)
        fail(flat, std::nullopt, lhs, a, "R(constant) != constant");
      break;
    }
    case Axiom::Aversity: {
      const ErrorProfile c = trial_profile(fixtures, rng, t, false, true);
      const double lhs = fn(c), rhs = weighted_mean(c);
      if (!(lhs > rhs + tol))
        fail(c, std::nullopt, lhs, rhs, "R(C) <= E[C] on a non-constant profile");
      break;
    }
  }
  return out;
}

}  // namespace

AxiomReport check_axioms(const AgglomerationFn& fn, const std::vector<Axiom>& axioms,
                         int trials, std::uint64_t seed, double tolerance) {
  if (trials < 1) throw std::invalid_argument("check_axioms: trials must be >= 1");
  const auto fixtures = fixture_profiles();

  AxiomReport report;
  report.seed = seed;
  report.trials = trials;
  report.tolerance = tolerance;

  for (std::size_t a = 0; a < axioms.size(); ++a) {
    AxiomCheck check;
    check.axiom = axioms[a];
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t ts = mix_seed(mix_seed(seed, static_cast<std::uint64_t>(a)),
                                        static_cast<std::uint64_t>(t));
      Rng rng(ts);
      TrialOutcome outcome = run_trial(fn, axioms[a], rng, t, fixtures, tolerance);
      check.trials_run = t + 1;
      if (!outcome.pass) {
        check.pass = false;
        outcome.witness.trial_seed = ts;
        check.witness = std::move(outcome.witness);
        break;
      }
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

AxiomReport check_axioms(const Agglomerator& agg, const std::vector<Axiom>& axioms,
                         int trials, std::uint64_t seed, double tolerance) {
  return check_axioms(
      [&agg](const ErrorProfile& profile) { return apply(agg, profile); }, axioms,
      trials, seed, tolerance);
}

RefinementVerdict check_refinement_monotonicity(const Agglomerator& agg,
                                                const Dataset& data,
                                                const Grouping& finer,
                                                const Grouping& coarser,
                                                Signedness signedness,
                                                double tolerance) {
  if (!is_refinement(finer, coarser))
    throw std::invalid_argument("check_refinement_monotonicity: not a refinement pair");
  if (finer.measure != MeasureKind::Empirical || coarser.measure != MeasureKind::Empirical)
    throw std::invalid_argument(
        "check_refinement_monotonicity: both measures must be empirical");
  RefinementVerdict verdict;
  verdict.finer_score = apply(agg, error_profile(data, finer, signedness));
  verdict.coarser_score = apply(agg, error_profile(data, coarser, signedness));
  verdict.holds = verdict.finer_score >= verdict.coarser_score - tolerance;
  return verdict;
}

}  // namespace calkit
