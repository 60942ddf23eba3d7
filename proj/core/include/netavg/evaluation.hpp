#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netavg/averaging.hpp"
#include "netavg/bayes_net.hpp"
#include "netavg/graph.hpp"
#include "netavg/learn.hpp"

namespace netavg {

// Skeleton-level confusion against a reference structure over the same
// N(N-1)/2 pair slots. Counts always sum to that total.
struct EvalMetrics {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double accuracy = 0.0;
  std::int64_t true_positive = 0;
  std::int64_t false_positive = 0;
  std::int64_t true_negative = 0;
  std::int64_t false_negative = 0;
  double n_over_p = 0.0;
};

Skeleton to_skeleton(const NodeSet& nodes, const std::vector<int>& pair_indices);

// Directions are ignored: the comparison is selected skeleton vs. the truth's
// skeleton. Sensitivity defaults to 1 on an edgeless truth and specificity to
// 1 on a complete one (no positives / no negatives to miss).
EvalMetrics compare_to_truth(const Skeleton& selected, const Dag& truth);

struct ExperimentSpec {
  std::vector<int> sample_sizes;
  LearnerConfig learner;
  int m = 200;
  int repeats = 10;
  std::uint64_t seed = 0;
  std::vector<std::string> methods = {"l1"};  // "l1", "adhoc:<t>", "noisefloor"
  int jobs = 0;
};

// "" when the method string is valid; otherwise a description of the
// problem. Valid: "l1", "noisefloor", "adhoc:<t>" with t in [0, 1].
std::string check_threshold_method(const std::string& method);

// Applies one method string to an existing profile. The noise floor is the
// only method needing the dataset (for the permutation runs); pass nullptr
// when selection happens on stored confidences alone.
ThresholdReport apply_threshold_method(const std::string& method,
                                       const ConfidenceProfile& profile, const Dataset* data,
                                       const LearnerConfig& learner, int m, std::uint64_t seed,
                                       int jobs);

struct RepeatOutcome {
  EvalMetrics metrics;
  double t_hat = 0.0;
};

// One (sample size, method) cell with its per-repeat outcomes.
struct ExperimentCell {
  int n = 0;
  double n_over_p = 0.0;
  std::string method;
  std::vector<RepeatOutcome> outcomes;
};

struct ExperimentTable {
  std::vector<ExperimentCell> cells;  // sample-size major, methods in spec order
};

// For each (n, repeat): forward-sample the truth, estimate edge confidences
// once, apply every requested threshold method, and score the selection.
// Seeds derive from (seed, size index, repeat), so reruns and job counts
// cannot change the table.
ExperimentTable run_experiment(const DiscreteBayesNet& truth, const ExperimentSpec& spec);

struct AggregateRow {
  int n = 0;
  double n_over_p = 0.0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Mean and t-based 95% interval over repeats, per cell and metric
// (sensitivity, specificity, accuracy, t_hat).
std::vector<AggregateRow> aggregate_rows(const ExperimentTable& table);

// Paired per-repeat differences metric(l1) - metric(other) for every non-l1
// method, reported as method "delta:l1-<other>".
std::vector<AggregateRow> threshold_delta_rows(const ExperimentTable& table);

// Tab-separated, fixed column order: n, n_over_p, method, metric, mean,
// ci_low, ci_high.
std::string to_tsv(const std::vector<AggregateRow>& rows);

}  // namespace netavg
