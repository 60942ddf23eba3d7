#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "netavg/averaging.hpp"
#include "netavg/bayes_net.hpp"
#include "netavg/error.hpp"
#include "netavg/evaluation.hpp"
#include "netavg/graph.hpp"
#include "test_support.hpp"

using namespace netavg;
using netavg::test_support::strong_pair_net;
using netavg::test_support::worked_profile;

namespace {

ConfidenceProfile profile_over(std::vector<std::string> names, std::vector<double> p_hat,
                               int m = 1000) {
  ConfidenceProfile profile;
  profile.nodes = NodeSet(std::move(names));
  profile.m = m;
  profile.p_hat = std::move(p_hat);
  for (double p : profile.p_hat)
    profile.direction_counts.push_back({static_cast<std::int64_t>(std::llround(p * m)), 0});
  return profile;
}

std::vector<double> random_confidences(int k, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> style(0, 2);
  std::vector<double> values(static_cast<std::size_t>(k));
  const int mode = style(gen);
  for (double& v : values) {
    v = unit(gen);
    if (mode == 1) v = std::round(v * 20.0) / 20.0;  // lattice: forces duplicate jumps
    if (mode == 2 && v < 0.3) v = 0.0;               // mass at the boundary
  }
  return values;
}

// Midpoint Riemann sum of |F - t| over [0, 1]: the numeric yardstick for the
// piecewise-exact objective. Step 1e-7 keeps the quadrature error per jump
// below 1e-7.
double riemann_l1(double t, std::vector<double> jumps) {
  std::sort(jumps.begin(), jumps.end());
  const double k = static_cast<double>(jumps.size());
  const double h = 1e-7;
  const long steps = 10000000;
  double total = 0.0;
  std::size_t rank = 0;
  for (long i = 0; i < steps; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h;
    while (rank < jumps.size() && jumps[rank] <= x) ++rank;
    total += std::abs(static_cast<double>(rank) / k - t) * h;
  }
  return total;
}

}  // namespace

TEST_SUITE("averaging") {

TEST_CASE("step cdf evaluation and quantiles") {
  StepCdf cdf({0.5, 0.2, 0.9, 0.5});  // unordered input, duplicate jump
  CHECK(cdf(0.1) == 0.0);
  CHECK(cdf(0.2) == doctest::Approx(0.25));
  CHECK(cdf(0.4999) == doctest::Approx(0.25));
  CHECK(cdf(0.5) == doctest::Approx(0.75));
  CHECK(cdf(0.8999) == doctest::Approx(0.75));
  CHECK(cdf(0.9) == 1.0);
  CHECK(cdf(1.0) == 1.0);

  CHECK(cdf.quantile(0.0) == 0.0);
  CHECK(cdf.quantile(0.25) == 0.2);
  CHECK(cdf.quantile(0.26) == 0.5);
  CHECK(cdf.quantile(0.75) == 0.5);
  CHECK(cdf.quantile(0.76) == 0.9);
  CHECK(cdf.quantile(1.0) == 0.9);

  CHECK_THROWS_AS(StepCdf({}), UsageError);
  CHECK_THROWS_AS(StepCdf({0.5, 1.2}), UsageError);
  CHECK_THROWS_AS(StepCdf({-0.1}), UsageError);
  CHECK_THROWS_AS(cdf.quantile(1.5), UsageError);
}

TEST_CASE("worked profile: threshold, cutoff and selection") {
  ThresholdReport report = estimate_threshold(worked_profile());
  CHECK(std::abs(report.t_hat - 0.4999816) < 1e-3);
  CHECK(report.cutoff == 0.3921);
  CHECK(report.selected == std::vector<int>{2, 4, 5});  // (A,D), (B,D), (C,D)
  CHECK(report.method == "l1");
  CHECK(report.l1_value == doctest::Approx(0.176).epsilon(1e-12));
}

TEST_CASE("objective expansion over the worked profile's partition") {
  ConfidenceProfile profile = worked_profile();
  const double t = 0.4999816;
  // term-by-term over {0} + ordered confidences + {1}
  const double by_hand = std::abs(0.0 - t) * (0.0460 - 0.0) +
                         std::abs(1.0 / 6 - t) * (0.2242 - 0.0460) +
                         std::abs(2.0 / 6 - t) * (0.3921 - 0.2242) +
                         std::abs(3.0 / 6 - t) * (0.7689 - 0.3921) +
                         std::abs(4.0 / 6 - t) * (0.8935 - 0.7689) +
                         std::abs(5.0 / 6 - t) * (0.9439 - 0.8935) +
                         std::abs(1.0 - t) * (1.0 - 0.9439);
  CHECK(l1_objective(t, profile) == doctest::Approx(by_hand).epsilon(1e-15));
  CHECK(l1_objective(t, profile) == doctest::Approx(0.17600397072).epsilon(1e-9));
}

TEST_CASE("objective of an all-zero profile is 1 - t") {
  ConfidenceProfile zeros = profile_over({"A", "B", "C"}, {0.0, 0.0, 0.0});
  for (double t : {0.0, 0.25, 0.5, 1.0})
    CHECK(l1_objective(t, zeros) == doctest::Approx(1.0 - t).epsilon(1e-12));
  ThresholdReport report = estimate_threshold(zeros);
  CHECK(report.t_hat == 1.0);
  CHECK(report.l1_value == doctest::Approx(0.0));
  CHECK(report.selected.empty());
}

TEST_CASE("objective rejects thresholds outside the unit interval") {
  ConfidenceProfile profile = worked_profile();
  CHECK_THROWS_AS(l1_objective(-0.01, profile), UsageError);
  CHECK_THROWS_AS(l1_objective(1.01, profile), UsageError);
}

TEST_CASE("objective agrees with a fine Riemann sum") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> values = random_confidences(4 + trial * 3, gen);
    StepCdf cdf(values);
    for (double t : {0.0, 0.31, 0.5, 0.77, 1.0})
      CHECK(std::abs(l1_objective(t, cdf) - riemann_l1(t, values)) < 1e-6);
  }
}

TEST_CASE("closed-form minimizer beats every grid point") {
  std::mt19937_64 gen(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 3 + static_cast<int>(gen() % 48);
    StepCdf cdf(random_confidences(k, gen));
    const double closed = l1_objective(l1_minimizing_threshold(cdf), cdf);
    for (int g = 0; g <= 10000; ++g)
      CHECK(closed <= l1_objective(static_cast<double>(g) / 10000.0, cdf) + 1e-9);
  }
}

TEST_CASE("estimated threshold minimizes over the grid for full profiles") {
  std::mt19937_64 gen(321);
  for (int trial = 0; trial < 25; ++trial) {
    const int nodes = 3 + static_cast<int>(gen() % 6);  // k in 3..28
    std::vector<std::string> names;
    for (int i = 0; i < nodes; ++i) names.push_back("v" + std::to_string(i));
    const int k = possible_edge_count(nodes);
    ConfidenceProfile profile = profile_over(names, random_confidences(k, gen));
    ThresholdReport report = estimate_threshold(profile);
    CHECK(report.l1_value == doctest::Approx(l1_objective(report.t_hat, profile)).epsilon(1e-12));
    for (int g = 0; g <= 10000; ++g)
      CHECK(report.l1_value <= l1_objective(static_cast<double>(g) / 10000.0, profile) + 1e-9);
  }
}

TEST_CASE("ideal zero-one profile recovers exactly the unit edges") {
  ConfidenceProfile profile = profile_over({"A", "B", "C", "D"},
                                           {0.0, 0.0, 0.0, 1.0, 1.0, 1.0});
  ThresholdReport report = estimate_threshold(profile);
  CHECK(report.t_hat == doctest::Approx(0.5));
  CHECK(report.cutoff == 0.0);
  CHECK(report.selected == std::vector<int>{3, 4, 5});
}

TEST_CASE("mocked constant learner yields a zero-one profile and exact recovery") {
  DiscreteBayesNet source = test_support::independent_binary_net(5);
  Dataset data = forward_sample(source, 60, 10);
  Dag fixed = Dag::with_edges(data.node_set(), {{0, 1}, {2, 1}, {3, 4}});
  StructureLearner constant = [&fixed](const Dataset&) { return fixed; };

  ConfidenceProfile profile = edge_confidence(data, constant, 40, 7);
  CHECK(profile.m == 40);
  Skeleton truth = skeleton_of(fixed);
  for (std::size_t i = 0; i < profile.edge_slots(); ++i) {
    const double expected = truth.contains_index(static_cast<int>(i)) ? 1.0 : 0.0;
    CHECK(profile.p_hat[i] == expected);
  }

  ThresholdReport report = estimate_threshold(profile);
  CHECK(to_skeleton(profile.nodes, report.selected) == truth);

  // unanimous orientations reassemble the source graph
  AveragedNetwork averaged = assign_directions(profile, report.selected);
  CHECK(averaged.dag == fixed);
}

TEST_CASE("bootstrap confidences live on the replicate lattice") {
  Dataset data = forward_sample(strong_pair_net(), 300, 3);
  LearnerConfig learner;
  ConfidenceProfile profile = edge_confidence(data, learner, 25, 11);
  REQUIRE(profile.edge_slots() == 1);
  const double scaled = profile.p_hat[0] * 25.0;
  CHECK(std::abs(scaled - std::llround(scaled)) < 1e-9);
  CHECK(profile.direction_counts[0][0] + profile.direction_counts[0][1] ==
        std::llround(scaled));
}

TEST_CASE("strong dependence earns high confidence at many replicates") {
  Dataset data = forward_sample(strong_pair_net(), 300, 19);
  LearnerConfig learner;
  ConfidenceProfile profile = edge_confidence(data, learner, 500, 23);
  CHECK(profile.p_hat[0] > 0.9);
}

TEST_CASE("replicate errors carry the replicate index and type") {
  Dataset data = forward_sample(strong_pair_net(), 40, 1);
  StructureLearner broken = [](const Dataset&) -> Dag { throw DataError("boom"); };
  CHECK_THROWS_WITH_AS(edge_confidence(data, broken, 4, 1), "replicate 0: boom", DataError);

  StructureLearner misused = [](const Dataset&) -> Dag { throw UsageError("bad knob"); };
  CHECK_THROWS_AS(edge_confidence(data, misused, 4, 1), UsageError);

  CHECK_THROWS_AS(edge_confidence(data, broken, 0, 1), UsageError);
}

TEST_CASE("profiles are independent of the worker count") {
  Dataset data = forward_sample(strong_pair_net(), 200, 44);
  LearnerConfig learner;
  ConfidenceProfile serial = edge_confidence(data, learner, 24, 9, 1);
  ConfidenceProfile parallel = edge_confidence(data, learner, 24, 9, 4);
  CHECK(serial.p_hat == parallel.p_hat);
  CHECK(serial.direction_counts == parallel.direction_counts);

  ConfidenceProfile floor_serial = permutation_confidence(data, learner, 24, 9, 1);
  ConfidenceProfile floor_parallel = permutation_confidence(data, learner, 24, 9, 3);
  CHECK(floor_serial.p_hat == floor_parallel.p_hat);
}

TEST_CASE("fixed cut selection") {
  ConfidenceProfile profile = worked_profile();

  ThresholdReport at80 = select_with_adhoc_threshold(profile, 0.80);
  CHECK(at80.selected == std::vector<int>{2, 5});  // (A,D), (C,D)
  CHECK(at80.cutoff == 0.80);
  CHECK(at80.t_hat == doctest::Approx(4.0 / 6));
  CHECK(at80.method == "adhoc:0.8");

  ThresholdReport at0 = select_with_adhoc_threshold(profile, 0.0);
  CHECK(at0.selected == std::vector<int>{0, 1, 2, 3, 4, 5});

  ThresholdReport at1 = select_with_adhoc_threshold(profile, 1.0);
  CHECK(at1.selected.empty());

  CHECK_THROWS_AS(select_with_adhoc_threshold(profile, 1.1), UsageError);
}

TEST_CASE("noise floor reports select above the floor maximum") {
  ConfidenceProfile real = worked_profile();

  ConfidenceProfile empty_floor = profile_over({"A", "B", "C", "D"},
                                               {0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  ThresholdReport all_above = noise_floor_report(real, empty_floor);
  CHECK(all_above.cutoff == 0.0);
  CHECK(all_above.selected == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(all_above.method == "noisefloor");

  ConfidenceProfile mid_floor = profile_over({"A", "B", "C", "D"},
                                             {0.30, 0.10, 0.05, 0.0, 0.25, 0.15});
  ThresholdReport above_03 = noise_floor_report(real, mid_floor);
  CHECK(above_03.cutoff == 0.30);
  CHECK(above_03.selected == std::vector<int>{2, 3, 4, 5});
  CHECK(above_03.t_hat == doctest::Approx(2.0 / 6));  // F_real at the cutoff

  ConfidenceProfile wrong_space = profile_over({"A", "B", "C"}, {0.0, 0.0, 0.0});
  CHECK_THROWS_AS(noise_floor_report(real, wrong_space), UsageError);
}

TEST_CASE("noise floor end to end") {
  LearnerConfig learner;

  // a strongly dependent pair clears the permutation floor almost always
  int cleared = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    Dataset dependent = forward_sample(strong_pair_net(), 1000, seed);
    if (noise_floor_threshold(dependent, learner, 20, seed).selected == std::vector<int>{0}) {
      ++cleared;
    }
  }
  CHECK(cleared >= 19);

  // independent columns: the real confidences sit inside the floor, so the
  // selection is typically empty
  int empty = 0;
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    Dataset independent = forward_sample(test_support::independent_binary_net(3), 400, seed);
    if (noise_floor_threshold(independent, learner, 20, seed).selected.empty()) ++empty;
  }
  CHECK(empty >= 14);
}

TEST_CASE("appending isolated nodes never drops the selected edges") {
  ConfidenceProfile profile = worked_profile();
  ConfidenceProfile widened;
  widened.nodes = NodeSet({"A", "B", "C", "D", "E", "F"});
  widened.m = profile.m;
  widened.p_hat.assign(static_cast<std::size_t>(possible_edge_count(6)), 0.0);
  widened.direction_counts.assign(widened.p_hat.size(), {0, 0});
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const auto old_idx = static_cast<std::size_t>(pair_index(4, i, j));
      const auto new_idx = static_cast<std::size_t>(pair_index(6, i, j));
      widened.p_hat[new_idx] = profile.p_hat[old_idx];
      widened.direction_counts[new_idx] = profile.direction_counts[old_idx];
    }
  }
  ThresholdReport report = estimate_threshold(widened);
  for (auto [i, j] : {std::pair{0, 3}, std::pair{1, 3}, std::pair{2, 3}})
    CHECK(std::count(report.selected.begin(), report.selected.end(), pair_index(6, i, j)) == 1);
}

TEST_CASE("selection is a monotone confidence cut for every method") {
  std::mt19937_64 gen(55);
  std::vector<std::string> names{"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 20; ++trial) {
    ConfidenceProfile profile = profile_over(names, random_confidences(10, gen));
    ConfidenceProfile floor = profile_over(names, random_confidences(10, gen));
    const std::vector<ThresholdReport> reports{
        estimate_threshold(profile),
        select_with_adhoc_threshold(profile, 0.4),
        noise_floor_report(profile, floor),
    };
    for (const auto& report : reports) {
      std::vector<bool> chosen(profile.edge_slots(), false);
      for (int idx : report.selected) chosen[static_cast<std::size_t>(idx)] = true;
      for (std::size_t i = 0; i < profile.edge_slots(); ++i)
        for (std::size_t j = 0; j < profile.edge_slots(); ++j)
          if (chosen[j] && profile.p_hat[i] >= profile.p_hat[j]) CHECK(chosen[i]);
    }
  }
}

TEST_CASE("direction assignment follows the replicate majority") {
  ConfidenceProfile profile = profile_over({"A", "B"}, {1.0});
  profile.direction_counts[0] = {100, 0};
  AveragedNetwork unanimous = assign_directions(profile, {0});
  CHECK(unanimous.dag.has_edge(0, 1));

  profile.direction_counts[0] = {3, 7};
  AveragedNetwork majority = assign_directions(profile, {0});
  CHECK(majority.dag.has_edge(1, 0));

  profile.direction_counts[0] = {50, 50};
  AveragedNetwork tie = assign_directions(profile, {0});
  CHECK(tie.dag.has_edge(0, 1));  // ties go to the canonical low -> high

  CHECK_THROWS_AS(assign_directions(profile, {5}), UsageError);
}

TEST_CASE("a majority cycle yields only its weakest orientation") {
  ConfidenceProfile profile = profile_over({"A", "B", "C"}, {1.0, 1.0, 1.0}, 100);
  profile.direction_counts[0] = {60, 40};  // A -> B, margin 20
  profile.direction_counts[1] = {48, 52};  // C -> A, margin 4 (the weakest)
  profile.direction_counts[2] = {55, 45};  // B -> C, margin 10
  AveragedNetwork averaged = assign_directions(profile, {0, 1, 2});
  CHECK(averaged.dag.edges() ==
        std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(skeleton_of(averaged.dag).edge_count() == 3);
}

}  // TEST_SUITE("averaging")
