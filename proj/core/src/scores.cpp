#include "netavg/scores.hpp"

#include <algorithm>
#include <cmath>

#include "netavg/error.hpp"

namespace netavg {

namespace {

// Score contribution of one observed parent configuration. counts holds the
// child-level counts there; alpha_j is ess / q, split evenly over the child
// levels.
double config_term(std::span<const std::int64_t> counts, double alpha_j, double alpha_jk) {
  std::int64_t nj = 0;
  double term = 0.0;
  for (std::int64_t njk : counts) {
    nj += njk;
    if (njk > 0) {
      term += std::lgamma(alpha_jk + static_cast<double>(njk)) - std::lgamma(alpha_jk);
    }
  }
  if (nj == 0) return 0.0;
  term += std::lgamma(alpha_j) - std::lgamma(alpha_j + static_cast<double>(nj));
  return term;
}

double score_family(const Dataset& data, int child, std::span<const int> parents, double ess,
                    std::int64_t dense_limit) {
  const auto& vars = data.variables();
  const int r = vars[static_cast<std::size_t>(child)].cardinality();

  // q can overflow 64 bits for wide families; track it in floating point for
  // the prior and saturate the integer used to pick the counting layout.
  double q_real = 1.0;
  std::int64_t q_int = 1;
  bool q_overflow = false;
  for (int p : parents) {
    const int card = vars[static_cast<std::size_t>(p)].cardinality();
    q_real *= static_cast<double>(card);
    if (!q_overflow && q_int > dense_limit / card) {
      q_overflow = true;
    } else if (!q_overflow) {
      q_int *= card;
    }
  }
  const double alpha_j = ess / q_real;
  const double alpha_jk = ess / (q_real * static_cast<double>(r));

  const std::size_t n = data.row_count();
  const auto child_col = data.column(child);
  double score = 0.0;

  if (!q_overflow && q_int <= dense_limit) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(q_int) * r, 0);
    for (std::size_t row = 0; row < n; ++row) {
      std::int64_t config = 0;
      for (int p : parents) {
        config = config * vars[static_cast<std::size_t>(p)].cardinality() + data.value(row, p);
      }
      ++counts[static_cast<std::size_t>(config) * r + child_col[row]];
    }
    for (std::int64_t j = 0; j < q_int; ++j) {
      score += config_term({counts.data() + static_cast<std::size_t>(j) * r,
                            static_cast<std::size_t>(r)},
                           alpha_j, alpha_jk);
    }
  } else {
    // Keyed by the parent value tuple; ordered so the summation order is
    // reproducible.
    std::map<std::vector<std::int32_t>, std::vector<std::int64_t>> counts;
    std::vector<std::int32_t> key(parents.size());
    for (std::size_t row = 0; row < n; ++row) {
      for (std::size_t pi = 0; pi < parents.size(); ++pi) key[pi] = data.value(row, parents[pi]);
      auto [it, inserted] = counts.try_emplace(key);
      if (inserted) it->second.assign(static_cast<std::size_t>(r), 0);
      ++it->second[static_cast<std::size_t>(child_col[row])];
    }
    for (const auto& [unused, cell] : counts) {
      score += config_term(cell, alpha_j, alpha_jk);
    }
  }
  return score;
}

}  // namespace

BdeuScorer::BdeuScorer(const Dataset& data, double ess, std::int64_t dense_limit)
    : data_(&data), ess_(ess), dense_limit_(dense_limit) {
  if (!(ess > 0.0)) throw UsageError("equivalent sample size must be positive");
  if (dense_limit < 1) throw UsageError("dense counting limit must be at least 1");
}

double BdeuScorer::family_score(int child, std::span<const int> parents) {
  std::pair<int, std::vector<int>> key(child, {parents.begin(), parents.end()});
  std::sort(key.second.begin(), key.second.end());
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  ++evaluations_;
  const double score = score_family(*data_, child, key.second, ess_, dense_limit_);
  cache_.emplace(std::move(key), score);
  return score;
}

double bdeu_node_score(const Dataset& data, int child, const std::vector<int>& parents,
                       double ess) {
  if (!(ess > 0.0)) throw UsageError("equivalent sample size must be positive");
  std::vector<int> sorted = parents;
  std::sort(sorted.begin(), sorted.end());
  return score_family(data, child, sorted, ess, 1 << 16);
}

ScoreValue bdeu_network_score(const Dataset& data, const Dag& dag, double ess) {
  ScoreValue value;
  value.per_node.reserve(static_cast<std::size_t>(dag.node_count()));
  for (int i = 0; i < dag.node_count(); ++i) {
    value.per_node.push_back(bdeu_node_score(data, i, dag.parents(i), ess));
    value.log_score += value.per_node.back();
  }
  return value;
}

}  // namespace netavg
