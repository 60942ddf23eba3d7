#include "netavg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "netavg/error.hpp"
#include "netavg/rng.hpp"

namespace netavg {

namespace {

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

void mean_and_ci(const std::vector<double>& values, double& mean, double& lo, double& hi) {
  const auto r = static_cast<double>(values.size());
  mean = 0.0;
  for (double v : values) mean += v;
  mean /= r;
  if (values.size() < 2) {
    lo = hi = mean;
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (r - 1.0));
  const boost::math::students_t dist(r - 1.0);
  const double half = boost::math::quantile(dist, 0.975) * sd / std::sqrt(r);
  lo = mean - half;
  hi = mean + half;
}

void append_rows(std::vector<AggregateRow>& rows, const ExperimentCell& cell,
                 const std::string& method, const std::string& metric,
                 const std::vector<double>& values) {
  AggregateRow row;
  row.n = cell.n;
  row.n_over_p = cell.n_over_p;
  row.method = method;
  row.metric = metric;
  mean_and_ci(values, row.mean, row.ci_low, row.ci_high);
  rows.push_back(std::move(row));
}

std::vector<double> metric_series(const ExperimentCell& cell,
                                  double EvalMetrics::* field) {
  std::vector<double> values;
  values.reserve(cell.outcomes.size());
  for (const auto& outcome : cell.outcomes) values.push_back(outcome.metrics.*field);
  return values;
}

constexpr std::pair<const char*, double EvalMetrics::*> kMetricFields[] = {
    {"sensitivity", &EvalMetrics::sensitivity},
    {"specificity", &EvalMetrics::specificity},
    {"accuracy", &EvalMetrics::accuracy},
};

}  // namespace

Skeleton to_skeleton(const NodeSet& nodes, const std::vector<int>& pair_indices) {
  Skeleton skeleton(nodes);
  for (int idx : pair_indices) {
    const auto [a, b] = pair_from_index(nodes.size(), idx);
    skeleton.insert(a, b);
  }
  return skeleton;
}

EvalMetrics compare_to_truth(const Skeleton& selected, const Dag& truth) {
  if (!(selected.nodes() == truth.nodes())) {
    throw UsageError("selection and reference structure cover different node sets");
  }
  const Skeleton reference = skeleton_of(truth);
  const int k = possible_edge_count(truth.node_count());

  EvalMetrics out;
  for (int idx = 0; idx < k; ++idx) {
    const bool in_truth = reference.contains_index(idx);
    const bool picked = selected.contains_index(idx);
    if (in_truth && picked) ++out.true_positive;
    if (in_truth && !picked) ++out.false_negative;
    if (!in_truth && picked) ++out.false_positive;
    if (!in_truth && !picked) ++out.true_negative;
  }
  const std::int64_t positives = out.true_positive + out.false_negative;
  const std::int64_t negatives = out.true_negative + out.false_positive;
  out.sensitivity =
      positives == 0 ? 1.0
                     : static_cast<double>(out.true_positive) / static_cast<double>(positives);
  out.specificity =
      negatives == 0 ? 1.0
                     : static_cast<double>(out.true_negative) / static_cast<double>(negatives);
  out.accuracy = k == 0 ? 1.0
                        : static_cast<double>(out.true_positive + out.true_negative) /
                              static_cast<double>(k);
  return out;
}

std::string check_threshold_method(const std::string& method) {
  if (method == "l1" || method == "noisefloor") return {};
  if (method.rfind("adhoc:", 0) == 0) {
    const std::string arg = method.substr(6);
    try {
      std::size_t used = 0;
      const double t = std::stod(arg, &used);
      if (used != arg.size()) return "method '" + method + "': trailing characters after the threshold";
      if (!(t >= 0.0 && t <= 1.0)) return "method '" + method + "': threshold must lie in [0, 1]";
      return {};
    } catch (const std::exception&) {
      return "method '" + method + "': cannot parse the threshold";
    }
  }
  return "unknown method '" + method + "' (expected l1, adhoc:<t>, or noisefloor)";
}

ThresholdReport apply_threshold_method(const std::string& method,
                                       const ConfidenceProfile& profile, const Dataset* data,
                                       const LearnerConfig& learner, int m, std::uint64_t seed,
                                       int jobs) {
  const std::string problem = check_threshold_method(method);
  if (!problem.empty()) throw UsageError(problem);
  if (method == "l1") return estimate_threshold(profile);
  if (method == "noisefloor") {
    if (!data) throw UsageError("the noise floor needs the dataset, not just confidences");
    const ConfidenceProfile floor = permutation_confidence(*data, learner, m, seed, jobs);
    return noise_floor_report(profile, floor);
  }
  return select_with_adhoc_threshold(profile, std::stod(method.substr(6)));
}

ExperimentTable run_experiment(const DiscreteBayesNet& truth, const ExperimentSpec& spec) {
  if (spec.sample_sizes.empty()) throw UsageError("at least one sample size is required");
  for (int n : spec.sample_sizes) {
    if (n < 1) throw UsageError("sample sizes must be at least 1");
  }
  if (spec.repeats < 1) throw UsageError("repeat count must be at least 1");
  if (spec.m < 1) throw UsageError("replicate count must be at least 1");
  if (spec.methods.empty()) throw UsageError("at least one threshold method is required");
  for (const auto& method : spec.methods) {
    const std::string problem = check_threshold_method(method);
    if (!problem.empty()) throw UsageError(problem);
  }

  const double p = static_cast<double>(parameter_count(truth));
  ExperimentTable table;
  table.cells.reserve(spec.sample_sizes.size() * spec.methods.size());
  for (std::size_t si = 0; si < spec.sample_sizes.size(); ++si) {
    const int n = spec.sample_sizes[si];
    std::vector<ExperimentCell*> cells;
    for (const auto& method : spec.methods) {
      ExperimentCell cell;
      cell.n = n;
      cell.n_over_p = static_cast<double>(n) / p;
      cell.method = method;
      table.cells.push_back(std::move(cell));
    }
    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
      cells.push_back(&table.cells[table.cells.size() - spec.methods.size() + mi]);
    }

    for (int r = 0; r < spec.repeats; ++r) {
      const std::uint64_t cell_seed =
          derive_seed(derive_seed(derive_seed(spec.seed, seed_stream::kExperimentCell),
                                  static_cast<std::uint64_t>(si)),
                      static_cast<std::uint64_t>(r));
      try {
        const Dataset data =
            forward_sample(truth, n, derive_seed(cell_seed, seed_stream::kSample));
        const ConfidenceProfile profile =
            edge_confidence(data, spec.learner, spec.m, cell_seed, spec.jobs);
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
          const ThresholdReport report =
              apply_threshold_method(spec.methods[mi], profile, &data, spec.learner, spec.m,
                                     cell_seed, spec.jobs);
          RepeatOutcome outcome;
          outcome.metrics =
              compare_to_truth(to_skeleton(profile.nodes, report.selected), truth.dag());
          outcome.metrics.n_over_p = cells[mi]->n_over_p;
          outcome.t_hat = report.t_hat;
          cells[mi]->outcomes.push_back(outcome);
        }
      } catch (const UsageError& e) {
        throw UsageError("sample size " + std::to_string(n) + ", repeat " + std::to_string(r) +
                         ": " + e.what());
      } catch (const DataError& e) {
        throw DataError("sample size " + std::to_string(n) + ", repeat " + std::to_string(r) +
                        ": " + e.what());
      } catch (const std::exception& e) {
        throw std::runtime_error("sample size " + std::to_string(n) + ", repeat " +
                                 std::to_string(r) + ": " + e.what());
      }
    }
  }
  return table;
}

std::vector<AggregateRow> aggregate_rows(const ExperimentTable& table) {
  std::vector<AggregateRow> rows;
  for (const auto& cell : table.cells) {
    for (const auto& [name, field] : kMetricFields) {
      append_rows(rows, cell, cell.method, name, metric_series(cell, field));
    }
    std::vector<double> t_hats;
    t_hats.reserve(cell.outcomes.size());
    for (const auto& outcome : cell.outcomes) t_hats.push_back(outcome.t_hat);
    append_rows(rows, cell, cell.method, "t_hat", t_hats);
  }
  return rows;
}

std::vector<AggregateRow> threshold_delta_rows(const ExperimentTable& table) {
  std::map<int, std::map<std::string, const ExperimentCell*>> by_n;
  std::vector<int> n_order;
  for (const auto& cell : table.cells) {
    if (by_n.find(cell.n) == by_n.end()) n_order.push_back(cell.n);
    by_n[cell.n][cell.method] = &cell;
  }

  std::vector<AggregateRow> rows;
  for (int n : n_order) {
    const auto& methods = by_n[n];
    const auto l1_it = methods.find("l1");
    if (l1_it == methods.end()) {
      throw UsageError("delta table needs the l1 method at sample size " + std::to_string(n));
    }
    const ExperimentCell& l1_cell = *l1_it->second;
    for (const auto& cell : table.cells) {
      if (cell.n != n || cell.method == "l1") continue;
      if (cell.outcomes.size() != l1_cell.outcomes.size()) {
        throw UsageError("method '" + cell.method + "' is missing repeats at sample size " +
                         std::to_string(n));
      }
      for (const auto& [name, field] : kMetricFields) {
        std::vector<double> deltas;
        deltas.reserve(cell.outcomes.size());
        for (std::size_t r = 0; r < cell.outcomes.size(); ++r) {
          deltas.push_back(l1_cell.outcomes[r].metrics.*field - cell.outcomes[r].metrics.*field);
        }
        append_rows(rows, cell, "delta:l1-" + cell.method, name, deltas);
      }
    }
  }
  return rows;
}

std::string to_tsv(const std::vector<AggregateRow>& rows) {
  std::string out = "n\tn_over_p\tmethod\tmetric\tmean\tci_low\tci_high\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n);
    out += '\t';
    out += format_real(row.n_over_p);
    out += '\t';
    out += row.method;
    out += '\t';
    out += row.metric;
    out += '\t';
    out += format_real(row.mean);
    out += '\t';
    out += format_real(row.ci_low);
    out += '\t';
    out += format_real(row.ci_high);
    out += '\n';
  }
  return out;
}

}  // namespace netavg
