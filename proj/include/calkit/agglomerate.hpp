#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "calkit/dataset.hpp"
#include "calkit/errors.hpp"
#include "calkit/groups.hpp"

namespace calkit {

// ---------------------------------------------------------------------------
// Agglomeration functions: functionals from error profiles to a single score.
//
// The coherent-risk family (mean, max, cvar, cvar mixtures) is meant for
// absolute errors and scores prediction quality; the deviation family
// (std_dev, range_dev, superquantile_dev) is meant for signed errors and
// scores disparity between groups. quadrangle_risk / quadrangle_dev move
// between the two families via R(C) = E[C] + D(C).
// ---------------------------------------------------------------------------

enum class AgglomeratorKind {
  Mean,
  Max,
  CVaR,
  CVaRMixture,
  StdDev,
  RangeDev,
  SuperquantileDev,
  QuadrangleRisk,
  QuadrangleDev,
};

struct Agglomerator {
  AgglomeratorKind kind = AgglomeratorKind::Mean;
  double alpha = 0.0;                               // CVaR, SuperquantileDev
  std::vector<std::pair<double, double>> mixture;   // (alpha_m, weight_m)
  std::shared_ptr<const Agglomerator> inner;        // quadrangle forms

  std::string describe() const;

  static Agglomerator mean();
  static Agglomerator max();
  // alpha in [0, 1]; cvar(0) is the mean and cvar(1) the maximum.
  static Agglomerator cvar(double alpha);
  // Components (alpha_m, w_m): alphas in [0,1], weights nonnegative, sum 1.
  static Agglomerator cvar_mixture(std::vector<std::pair<double, double>> components);
  static Agglomerator std_dev();
  static Agglomerator range_dev();
  // cvar(alpha) of the centered profile; requires alpha > 0.
  static Agglomerator superquantile_dev(double alpha);
  // mean + inner deviation.
  static Agglomerator quadrangle_risk(Agglomerator inner_deviation);
  // inner risk - mean.
  static Agglomerator quadrangle_dev(Agglomerator inner_risk);
};

// Left-continuous generalized inverse of the weighted CDF:
// Q(t) = inf{ v : F(v) >= t }, with Q(0) the minimum and Q(1) the maximum
// over the profile's support. t outside [0, 1] is an error.
double quantile(const ErrorProfile& profile, double t);

// Evaluates an agglomerator on a profile. cvar(alpha) integrates the
// quantile function exactly over (alpha, 1] by sorting; the endpoints are
// the mean and the maximum exactly.
double apply(const Agglomerator& agg, const ErrorProfile& profile);

// ---------------------------------------------------------------------------
// Axiom verification harness
// ---------------------------------------------------------------------------

// A1 Monotonicity          R(C) <= R(C') when C <= C' pointwise
// A2 TranslationEquivariance  R(C + a) = R(C) + a
// A3 PositiveHomogeneity   R(0) = 0 and R(mu C) = mu R(C) for mu > 0
// A4 Subadditivity         R(C + C') <= R(C) + R(C')
// A5 LawInvariance         R depends only on the value distribution
// A6 Normalisation         D >= 0, and D(C) = 0 iff C constant
// A7 Agreement             R(constant a) = a
// Aversity                 R(C) > E[C] for non-constant C
enum class Axiom {
  Monotonicity,
  TranslationEquivariance,
  PositiveHomogeneity,
  Subadditivity,
  LawInvariance,
  Normalisation,
  Agreement,
  Aversity,
};

std::string axiom_name(Axiom axiom);  // "A1".."A7", "aversity"

// Concrete reproducible counterexample: the profile pair and the compared
// quantities at the first failing trial.
struct AxiomWitness {
  ErrorProfile primary;
  std::optional<ErrorProfile> secondary;
  double lhs = 0.0;
  double rhs = 0.0;
  std::uint64_t trial_seed = 0;
  std::string detail;
};

struct AxiomCheck {
  Axiom axiom = Axiom::Monotonicity;
  bool pass = true;
  int trials_run = 0;
  std::optional<AxiomWitness> witness;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  std::uint64_t seed = 0;
  int trials = 0;
  double tolerance = 0.0;

  bool all_pass() const;
  const AxiomCheck* find(Axiom axiom) const;
};

using AgglomerationFn = std::function<double(const ErrorProfile&)>;

// Randomized property checks on seeded profile pairs sharing a weight
// vector, preceded by fixed adversarial fixtures. Failures are verdicts
// carrying witnesses, not errors.
AxiomReport check_axioms(const AgglomerationFn& fn, const std::vector<Axiom>& axioms,
                         int trials, std::uint64_t seed, double tolerance = 1e-9);

AxiomReport check_axioms(const Agglomerator& agg, const std::vector<Axiom>& axioms,
                         int trials, std::uint64_t seed, double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Refinement monotonicity
// ---------------------------------------------------------------------------

struct RefinementVerdict {
  bool holds = false;
  double finer_score = 0.0;
  double coarser_score = 0.0;
};

// Verifies score(finer) >= score(coarser) - tolerance. Requires finer to
// refine coarser and both measures to be empirical; with signed errors this
// holds for law-invariant convex agglomerators, with absolute errors when
// the agglomerator is additionally monotonic.
RefinementVerdict check_refinement_monotonicity(const Agglomerator& agg,
                                                const Dataset& data,
                                                const Grouping& finer,
                                                const Grouping& coarser,
                                                Signedness signedness,
                                                double tolerance = 1e-9);

}  // namespace calkit
