#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "netavg/dataset.hpp"
#include "netavg/graph.hpp"
#include "netavg/learn.hpp"

namespace netavg {

// Per-edge bootstrap support over the canonical pair order.
// p_hat[i] = (replicates whose learned skeleton contains pair i) / m.
// direction_counts[i] = {low->high count, high->low count}; the two sum to
// the pair's presence count.
struct ConfidenceProfile {
  NodeSet nodes;
  int m = 0;
  std::vector<double> p_hat;
  std::vector<std::array<std::int64_t, 2>> direction_counts;

  std::size_t edge_slots() const { return p_hat.size(); }
};

// Empirical CDF of the confidence values: F(x) = (jumps <= x) / k,
// right-continuous, F = 1 at and beyond the largest jump.
class StepCdf {
 public:
  explicit StepCdf(std::vector<double> jumps);

  double operator()(double x) const;
  // inf{x in [0,1] : F(x) >= t}; t = 0 maps to 0.
  double quantile(double t) const;
  const std::vector<double>& jumps() const { return jumps_; }

 private:
  std::vector<double> jumps_;  // sorted ascending
};

struct ThresholdReport {
  double t_hat = 0.0;
  double cutoff = 0.0;
  double l1_value = 0.0;
  std::string method;          // "l1", "adhoc:<t>", "noisefloor"
  std::vector<int> selected;   // canonical pair indices, ascending
};

struct AveragedNetwork {
  Dag dag;
};

// Replicate learner: bootstrap replicas are independent invocations of this.
using StructureLearner = std::function<Dag(const Dataset&)>;

// Bootstrap m replicates (seeds derived per replicate, so any job count gives
// the same profile), learn each, and tally skeleton membership and edge
// orientation.
ConfidenceProfile edge_confidence(const Dataset& data, const StructureLearner& learner, int m,
                                  std::uint64_t seed, int jobs = 0);
ConfidenceProfile edge_confidence(const Dataset& data, const LearnerConfig& learner, int m,
                                  std::uint64_t seed, int jobs = 0);

// The same bootstrap tally applied to a column-permuted copy of the data:
// each column is shuffled independently, destroying all cross-column
// association, so under the null the result is distributed like the real
// profile. This is the dependence-free reference distribution.
ConfidenceProfile permutation_confidence(const Dataset& data, const StructureLearner& learner,
                                         int m, std::uint64_t seed, int jobs = 0);
ConfidenceProfile permutation_confidence(const Dataset& data, const LearnerConfig& learner,
                                         int m, std::uint64_t seed, int jobs = 0);

// Integral of |F - t| over [0, 1] for the profile's ECDF: the L1 distance
// between F and the ideal step at t, evaluated piece by piece.
double l1_objective(double t, const StepCdf& cdf);
double l1_objective(double t, const ConfidenceProfile& profile);

// Closed-form argmin of the L1 objective: the weighted median of the ECDF
// plateau values, each weighted by its plateau width; an exact split takes
// the midpoint of the two flanking levels.
double l1_minimizing_threshold(const StepCdf& cdf);

// Minimizes the L1 objective in closed form (weighted median of the ECDF
// plateau values, weighted by plateau width; exact ties take the interval
// midpoint). cutoff = F^-1(t_hat); selected = confidences strictly above the
// cutoff.
ThresholdReport estimate_threshold(const ConfidenceProfile& profile);

// Fixed confidence cut: selected = { i : p_hat[i] > t }. t_hat is reported as
// F(t) so the quantile relation still identifies the same selection.
ThresholdReport select_with_adhoc_threshold(const ConfidenceProfile& profile, double t);

// Selection against a permutation floor: cutoff = max floor confidence,
// selected = real confidences strictly above it.
ThresholdReport noise_floor_report(const ConfidenceProfile& real_profile,
                                   const ConfidenceProfile& floor_profile);
ThresholdReport noise_floor_threshold(const Dataset& data, const StructureLearner& learner,
                                      int m, std::uint64_t seed, int jobs = 0);
ThresholdReport noise_floor_threshold(const Dataset& data, const LearnerConfig& learner, int m,
                                      std::uint64_t seed, int jobs = 0);

// Orients each selected edge by its replicate majority (ties low->high).
// Orientations are installed in decreasing-margin order; one that would close
// a cycle is flipped, so low-margin directions yield first and the skeleton
// is preserved.
AveragedNetwork assign_directions(const ConfidenceProfile& profile,
                                  const std::vector<int>& selected);

}  // namespace netavg
