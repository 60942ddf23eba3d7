#include "netavg/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "netavg/error.hpp"
#include "netavg/parallel.hpp"
#include "netavg/rng.hpp"

namespace netavg {

namespace {

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

void check_unit_interval(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw UsageError(std::string(what) + " must lie in [0, 1]");
  }
}

void check_profile(const ConfidenceProfile& profile) {
  const auto k = static_cast<std::size_t>(possible_edge_count(profile.nodes.size()));
  if (profile.p_hat.empty() || profile.p_hat.size() != k) {
    throw UsageError("confidence profile does not cover the node set's edge slots");
  }
  for (double p : profile.p_hat) check_unit_interval(p, "edge confidence");
}

// Tally of one replicate: per pair slot, 0 absent, 1 low->high, 2 high->low.
std::vector<std::uint8_t> replicate_states(const Dag& dag, int node_count) {
  std::vector<std::uint8_t> states(static_cast<std::size_t>(possible_edge_count(node_count)), 0);
  for (const auto& [u, v] : dag.edges()) {
    states[static_cast<std::size_t>(pair_index(node_count, u, v))] = u < v ? 1 : 2;
  }
  return states;
}

ConfidenceProfile tally(const Dataset& data, const StructureLearner& learner, int m,
                        std::uint64_t seed, int jobs, std::uint64_t stream) {
  if (m < 1) throw UsageError("replicate count must be at least 1");
  const int n = data.column_count();
  const std::uint64_t base = derive_seed(seed, stream);

  std::vector<std::vector<std::uint8_t>> per_replicate(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), jobs, [&](std::size_t b) {
    const std::uint64_t replicate_seed = derive_seed(base, static_cast<std::uint64_t>(b));
    try {
      per_replicate[b] = replicate_states(learner(bootstrap_resample(data, replicate_seed)), n);
    } catch (const UsageError& e) {
      throw UsageError("replicate " + std::to_string(b) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("replicate " + std::to_string(b) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate " + std::to_string(b) + ": " + e.what());
    }
  });

  ConfidenceProfile profile;
  profile.nodes = data.node_set();
  profile.m = m;
  const auto k = static_cast<std::size_t>(possible_edge_count(n));
  profile.p_hat.assign(k, 0.0);
  profile.direction_counts.assign(k, {0, 0});
  std::vector<std::int64_t> present(k, 0);
  for (const auto& states : per_replicate) {
    for (std::size_t i = 0; i < k; ++i) {
      if (states[i] == 0) continue;
      ++present[i];
      ++profile.direction_counts[i][states[i] - 1];
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    profile.p_hat[i] = static_cast<double>(present[i]) / static_cast<double>(m);
  }
  return profile;
}

StructureLearner config_learner(const LearnerConfig& config) {
  return [config](const Dataset& data) { return learn_structure(data, config).dag; };
}

}  // namespace

StepCdf::StepCdf(std::vector<double> jumps) : jumps_(std::move(jumps)) {
  if (jumps_.empty()) throw UsageError("a step CDF needs at least one jump");
  for (double x : jumps_) check_unit_interval(x, "CDF jump");
  std::sort(jumps_.begin(), jumps_.end());
}

double StepCdf::operator()(double x) const {
  const auto at_most = std::upper_bound(jumps_.begin(), jumps_.end(), x) - jumps_.begin();
  return static_cast<double>(at_most) / static_cast<double>(jumps_.size());
}

double StepCdf::quantile(double t) const {
  check_unit_interval(t, "quantile level");
  if (t == 0.0) return 0.0;
  const double k = static_cast<double>(jumps_.size());
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    // F at a jump is the rank of its last duplicate.
    std::size_t last = i;
    while (last + 1 < jumps_.size() && jumps_[last + 1] == jumps_[i]) ++last;
    if (static_cast<double>(last + 1) / k >= t) return jumps_[i];
    i = last;
  }
  return jumps_.back();
}

double l1_objective(double t, const StepCdf& cdf) {
  check_unit_interval(t, "threshold");
  const auto& jumps = cdf.jumps();
  const double k = static_cast<double>(jumps.size());
  double value = 0.0;
  double x = 0.0;
  double rank = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    value += std::abs(rank / k - t) * (jumps[i] - x);
    x = jumps[i];
    rank += 1.0;
  }
  value += std::abs(1.0 - t) * (1.0 - x);
  return value;
}

double l1_objective(double t, const ConfidenceProfile& profile) {
  check_profile(profile);
  return l1_objective(t, StepCdf(profile.p_hat));
}

double l1_minimizing_threshold(const StepCdf& cdf) {
  const auto& jumps = cdf.jumps();
  const double k = static_cast<double>(jumps.size());

  // Plateau representation: between consecutive partition points of
  // {0} u jumps u {1}, F is constant; |F - t| weighted by plateau width is
  // minimized at the weighted median of the plateau F-values.
  std::vector<double> levels;
  std::vector<double> widths;
  levels.reserve(jumps.size() + 1);
  widths.reserve(jumps.size() + 1);
  double x = 0.0;
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    levels.push_back(static_cast<double>(i) / k);
    widths.push_back(jumps[i] - x);
    x = jumps[i];
  }
  levels.push_back(1.0);
  widths.push_back(1.0 - x);

  double total = 0.0;
  for (double w : widths) total += w;
  const double half = total / 2.0;

  double t_hat = levels.back();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    cumulative += widths[i];
    if (cumulative > half) {
      t_hat = levels[i];
      break;
    }
    if (cumulative == half) {
      // Exact split: every t between this plateau's level and the next
      // weighted one scores the same; take the midpoint.
      t_hat = levels[i];
      for (std::size_t j = i + 1; j < levels.size(); ++j) {
        if (widths[j] > 0.0) {
          t_hat = (levels[i] + levels[j]) / 2.0;
          break;
        }
      }
      break;
    }
  }
  return t_hat;
}

ThresholdReport estimate_threshold(const ConfidenceProfile& profile) {
  check_profile(profile);
  const StepCdf cdf(profile.p_hat);
  const double t_hat = l1_minimizing_threshold(cdf);

  ThresholdReport report;
  report.method = "l1";
  report.t_hat = t_hat;
  report.cutoff = cdf.quantile(t_hat);
  report.l1_value = l1_objective(t_hat, cdf);
  for (std::size_t i = 0; i < profile.p_hat.size(); ++i) {
    if (profile.p_hat[i] > report.cutoff) report.selected.push_back(static_cast<int>(i));
  }
  return report;
}

ThresholdReport select_with_adhoc_threshold(const ConfidenceProfile& profile, double t) {
  check_profile(profile);
  check_unit_interval(t, "threshold");
  const StepCdf cdf(profile.p_hat);
  ThresholdReport report;
  report.method = "adhoc:" + format_real(t);
  report.cutoff = t;
  report.t_hat = cdf(t);
  report.l1_value = l1_objective(report.t_hat, cdf);
  for (std::size_t i = 0; i < profile.p_hat.size(); ++i) {
    if (profile.p_hat[i] > t) report.selected.push_back(static_cast<int>(i));
  }
  return report;
}

ThresholdReport noise_floor_report(const ConfidenceProfile& real_profile,
                                   const ConfidenceProfile& floor_profile) {
  check_profile(real_profile);
  check_profile(floor_profile);
  if (floor_profile.p_hat.size() != real_profile.p_hat.size()) {
    throw UsageError("floor profile covers a different edge space");
  }
  const double cutoff =
      *std::max_element(floor_profile.p_hat.begin(), floor_profile.p_hat.end());
  const StepCdf cdf(real_profile.p_hat);
  ThresholdReport report;
  report.method = "noisefloor";
  report.cutoff = cutoff;
  report.t_hat = cdf(cutoff);
  report.l1_value = l1_objective(report.t_hat, cdf);
  for (std::size_t i = 0; i < real_profile.p_hat.size(); ++i) {
    if (real_profile.p_hat[i] > cutoff) report.selected.push_back(static_cast<int>(i));
  }
  return report;
}

ConfidenceProfile edge_confidence(const Dataset& data, const StructureLearner& learner, int m,
                                  std::uint64_t seed, int jobs) {
  return tally(data, learner, m, seed, jobs, seed_stream::kBootstrap);
}

ConfidenceProfile edge_confidence(const Dataset& data, const LearnerConfig& learner, int m,
                                  std::uint64_t seed, int jobs) {
  return tally(data, config_learner(learner), m, seed, jobs, seed_stream::kBootstrap);
}

ConfidenceProfile permutation_confidence(const Dataset& data, const StructureLearner& learner,
                                         int m, std::uint64_t seed, int jobs) {
  // One independent shuffle per column removes every cross-column association;
  // the identical resampling tally then runs on the permuted data, so under
  // independence the floor is distributed exactly like the real profile.
  const std::uint64_t floor_seed = derive_seed(seed, seed_stream::kPermutation);
  return tally(permute_columns(data, floor_seed), learner, m, floor_seed, jobs,
               seed_stream::kBootstrap);
}

ConfidenceProfile permutation_confidence(const Dataset& data, const LearnerConfig& learner,
                                         int m, std::uint64_t seed, int jobs) {
  return permutation_confidence(data, config_learner(learner), m, seed, jobs);
}

ThresholdReport noise_floor_threshold(const Dataset& data, const StructureLearner& learner,
                                      int m, std::uint64_t seed, int jobs) {
  const ConfidenceProfile real_profile = edge_confidence(data, learner, m, seed, jobs);
  const ConfidenceProfile floor_profile = permutation_confidence(data, learner, m, seed, jobs);
  return noise_floor_report(real_profile, floor_profile);
}

ThresholdReport noise_floor_threshold(const Dataset& data, const LearnerConfig& learner, int m,
                                      std::uint64_t seed, int jobs) {
  return noise_floor_threshold(data, config_learner(learner), m, seed, jobs);
}

AveragedNetwork assign_directions(const ConfidenceProfile& profile,
                                  const std::vector<int>& selected) {
  check_profile(profile);
  const int n = profile.nodes.size();

  struct Arc {
    int pair = 0;
    int from = 0;
    int to = 0;
    std::int64_t margin = 0;
  };
  std::vector<Arc> arcs;
  arcs.reserve(selected.size());
  for (int idx : selected) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= profile.p_hat.size()) {
      throw UsageError("selected edge outside the edge space");
    }
    const auto [a, b] = pair_from_index(n, idx);
    const auto& counts = profile.direction_counts[static_cast<std::size_t>(idx)];
    Arc arc;
    arc.pair = idx;
    arc.margin = std::abs(counts[0] - counts[1]);
    const bool forward = counts[0] >= counts[1];  // tie keeps the canonical direction
    arc.from = forward ? a : b;
    arc.to = forward ? b : a;
    arcs.push_back(arc);
  }
  std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& lhs, const Arc& rhs) {
    if (lhs.margin != rhs.margin) return lhs.margin > rhs.margin;
    return lhs.pair < rhs.pair;
  });

  AveragedNetwork net{Dag(profile.nodes)};
  for (const Arc& arc : arcs) {
    if (net.dag.would_create_cycle(arc.from, arc.to)) {
      net.dag.add_edge(arc.to, arc.from);
    } else {
      net.dag.add_edge(arc.from, arc.to);
    }
  }
  return net;
}

}  // namespace netavg
