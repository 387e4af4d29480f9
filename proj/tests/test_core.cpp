#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "calkit/errors.hpp"
#include "calkit/grouping.hpp"
#include "helpers.hpp"

using namespace calkit;
using testutil::four_point_fixture;
using testutil::random_dataset;
using testutil::random_group;
using testutil::random_input_complete_group;

TEST_CASE("dataset invariants are enforced at construction") {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  Eigen::VectorXd y(2), p(2);
  y << 0.0, 1.0;
  p << 0.3, 0.4;
  CHECK_NOTHROW(make_dataset(x, y, p));

  Eigen::VectorXd bad_label = y;
  bad_label[1] = 2.0;
  CHECK_THROWS_AS(make_dataset(x, bad_label, p), std::invalid_argument);

  Eigen::VectorXd bad_pred = p;
  bad_pred[0] = 1.5;
  CHECK_THROWS_AS(make_dataset(x, y, bad_pred), std::invalid_argument);

  CHECK_THROWS_AS(make_dataset(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), Eigen::VectorXd(0)),
                  std::invalid_argument);

  // duplicate inputs may differ in label but not in prediction
  Eigen::MatrixXd dup(2, 1);
  dup << 0.5, 0.5;
  Eigen::VectorXd dup_y(2);
  dup_y << 0.0, 1.0;
  Eigen::VectorXd same_p(2), diff_p(2);
  same_p << 0.3, 0.3;
  diff_p << 0.3, 0.4;
  CHECK_NOTHROW(make_dataset(dup, dup_y, same_p));
  CHECK_THROWS_AS(make_dataset(dup, dup_y, diff_p), std::invalid_argument);
}

TEST_CASE("group_error matches hand-evaluated means") {
  const Dataset data = four_point_fixture();

  Group front;
  front.indices = {0, 1};
  CHECK(group_error(data, front) == doctest::Approx(-0.2).epsilon(1e-15));

  Group all;
  all.indices = {0, 1, 2, 3};
  CHECK(group_error(data, all) == doctest::Approx(-0.25).epsilon(1e-15));

  // perfect predictor
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 1.0, 2.0;
  Eigen::VectorXd y(3);
  y << 0.0, 1.0, 0.0;
  const Dataset perfect = make_dataset(x, y, y);
  Group g;
  g.indices = {0, 1, 2};
  CHECK(group_error(perfect, g) == 0.0);

  Group empty;
  CHECK_THROWS_WITH_AS(group_error(data, empty), doctest::Contains("degenerate group"),
                       std::invalid_argument);
}

TEST_CASE("empirical_bayes is the level-set label mean") {
  Eigen::MatrixXd x(5, 1);
  x << 0.0, 0.0, 1.0, 1.0, 1.0;
  Eigen::VectorXd y(5);
  y << 0.0, 1.0, 1.0, 1.0, 0.0;
  Eigen::VectorXd p(5);
  p << 0.5, 0.5, 0.7, 0.7, 0.7;
  const Dataset data = make_dataset(x, y, p);
  const Eigen::VectorXd bayes = empirical_bayes(data);
  CHECK(bayes[0] == doctest::Approx(0.5));
  CHECK(bayes[1] == doctest::Approx(0.5));
  CHECK(bayes[2] == doctest::Approx(2.0 / 3.0));
  CHECK(bayes[4] == doctest::Approx(2.0 / 3.0));

  // all-distinct inputs: bayes reproduces the labels
  const Dataset distinct = four_point_fixture();
  const Eigen::VectorXd b2 = empirical_bayes(distinct);
  for (int i = 0; i < 4; ++i) CHECK(b2[i] == distinct.labels[i]);
}

TEST_CASE("generalized_error agrees with group_error on uniform distributions") {
  const Dataset data = four_point_fixture();
  Group front;
  front.indices = {0, 1};
  const GroupDistribution dist = uniform_distribution(data, front);
  CHECK(generalized_error(data, dist) == doctest::Approx(-0.2).epsilon(1e-13));

  // point mass on a unique input
  GroupDistribution point;
  point.indices = {2};
  point.weights = Eigen::VectorXd::Ones(1);
  CHECK(generalized_error(data, point) ==
        doctest::Approx(data.predictions[2] - data.labels[2]));

  // predictor equal to the empirical bayes: zero error for any distribution
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 0.0, 1.0, 2.0;
  Eigen::VectorXd y(4);
  y << 0.0, 1.0, 1.0, 0.0;
  Eigen::VectorXd p(4);
  p << 0.5, 0.5, 1.0, 0.0;
  const Dataset matching = make_dataset(x, y, p);
  GroupDistribution uniform;
  uniform.indices = {0, 1, 2, 3};
  uniform.weights = Eigen::VectorXd::Constant(4, 0.25);
  CHECK(generalized_error(matching, uniform) == doctest::Approx(0.0).epsilon(1e-15));

  // non-normalized weights are rejected
  GroupDistribution bad;
  bad.indices = {0, 1};
  bad.weights = Eigen::VectorXd::Constant(2, 0.4);
  CHECK_THROWS_AS(generalized_error(data, bad), std::invalid_argument);
}

TEST_CASE("uniform group distributions reproduce group_error within 1e-12") {
  Rng rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset data = random_dataset(rng, rng.uniform_int(3, 40), rng.uniform_int(1, 3),
                                        /*with_duplicates=*/true);
    const Group group = random_input_complete_group(rng, data);
    const double direct = group_error(data, group);
    const double generalized = generalized_error(data, uniform_distribution(data, group));
    CHECK(std::abs(direct - generalized) <= 1e-12);
  }
}

TEST_CASE("signed errors negate exactly under label/prediction flips") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset data =
        random_dataset(rng, rng.uniform_int(2, 30), 1, false, /*dyadic=*/true);
    const Dataset flipped = make_dataset(
        data.features, (1.0 - data.labels.array()).matrix(),
        (1.0 - data.predictions.array()).matrix());
    const Group group = random_group(rng, static_cast<int>(data.size()));
    CHECK(group_error(flipped, group) == -group_error(data, group));
  }
}

TEST_CASE("signed group errors stay inside [-1, 1]") {
  Rng rng(909);
  for (int trial = 0; trial < 100; ++trial) {
    const Dataset data = random_dataset(rng, rng.uniform_int(1, 25), 2);
    const Group group = random_group(rng, static_cast<int>(data.size()));
    const double err = group_error(data, group);
    CHECK(err >= -1.0);
    CHECK(err <= 1.0);
  }
}

TEST_CASE("mixing bound for disjoint unions") {
  Rng rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rng.uniform_int(4, 40);
    const Dataset data = random_dataset(rng, n, 1);
    Group a, b;
    for (int i = 0; i < n; ++i) {
      const int coin = rng.uniform_int(0, 2);
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
    CHECK(std::abs(group_error(data, both)) <= bound + 1e-12);
  }
}

TEST_CASE("error_profile assembles per-member errors with the grouping measure") {
  const Dataset data = four_point_fixture();
  BinningScheme scheme;
  scheme.count = 2;
  const Grouping bins = prediction_bins(data, scheme);

  const ErrorProfile absolute = error_profile(data, bins, Signedness::Absolute);
  REQUIRE(absolute.values.size() == 2);
  CHECK(absolute.values[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(absolute.values[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(absolute.weights[0] == doctest::Approx(0.5));
  CHECK(absolute.weights[1] == doctest::Approx(0.5));

  // single member = full index set
  Grouping whole;
  whole.kind = GroupingKind::Partition;
  whole.universe = 4;
  Group all;
  all.indices = {0, 1, 2, 3};
  whole.groups.push_back(all);
  const ErrorProfile single = error_profile(data, whole, Signedness::Signed);
  REQUIRE(single.values.size() == 1);
  CHECK(single.values[0] == doctest::Approx(-0.25));
  CHECK(single.weights[0] == doctest::Approx(1.0));

  // uniform vs empirical coincide on equal-sized members
  Grouping uniform = bins;
  uniform.measure = MeasureKind::Uniform;
  const ErrorProfile u = error_profile(data, uniform, Signedness::Absolute);
  for (int j = 0; j < 2; ++j) CHECK(u.weights[j] == doctest::Approx(absolute.weights[j]));
}

TEST_CASE("empty members are dropped with measure renormalization") {
  const Dataset data = four_point_fixture();
  Grouping grouping;
  grouping.kind = GroupingKind::Overlapping;
  grouping.universe = 4;
  grouping.measure = MeasureKind::Uniform;
  grouping.groups.resize(3);
  grouping.groups[0].indices = {0, 1};
  grouping.groups[2].indices = {2, 3};
  const ProfileDetail detail = profile_detail(data, grouping);
  REQUIRE(detail.member == std::vector<int>{0, 2});
  CHECK(detail.weights[0] == doctest::Approx(0.5));
  CHECK(detail.weights[1] == doctest::Approx(0.5));

  Grouping all_empty;
  all_empty.kind = GroupingKind::Overlapping;
  all_empty.universe = 4;
  all_empty.groups.resize(2);
  CHECK_THROWS_WITH_AS(profile_detail(data, all_empty),
                       doctest::Contains("vacuous grouping"), std::invalid_argument);
}

TEST_CASE("make_profile validates weights and finiteness") {
  Eigen::VectorXd values(2), weights(2);
  values << 0.1, 0.2;
  weights << 0.5, 0.5;
  CHECK_NOTHROW(make_profile(values, weights));

  Eigen::VectorXd bad_w(2);
  bad_w << 0.6, 0.6;
  CHECK_THROWS_AS(make_profile(values, bad_w), std::invalid_argument);

  Eigen::VectorXd nan_v(2);
  nan_v << 0.1, std::nan("");
  CHECK_THROWS_AS(make_profile(nan_v, weights), std::invalid_argument);
}

TEST_CASE("content_hash distinguishes datasets and is stable") {
  const Dataset a = four_point_fixture();
  const Dataset b = four_point_fixture();
  CHECK(content_hash(a) == content_hash(b));
  Dataset c = four_point_fixture();
  Eigen::VectorXd changed = c.predictions;
  changed[0] = 0.25;
  CHECK(content_hash(a) != content_hash(make_dataset(c.features, c.labels, changed)));
}
