#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "netavg/dataset.hpp"
#include "netavg/graph.hpp"

namespace netavg {

struct ScoreValue {
  double log_score = 0.0;
  std::vector<double> per_node;
};

// Marginal-likelihood family scorer with a Dirichlet prior spread uniformly
// over the ess (equivalent sample size) pseudo-counts. Caches by
// (child, sorted parent set); the cache is why hill climbing over the same
// dataset stays cheap.
class BdeuScorer {
 public:
  // dense_limit caps the parent-configuration count for which counting uses a
  // flat array; larger families fall back to a sorted sparse map. Exposed so
  // tests can force the sparse path.
  BdeuScorer(const Dataset& data, double ess, std::int64_t dense_limit = 1 << 16);

  double family_score(int child, std::span<const int> parents);

  const Dataset& data() const { return *data_; }
  double ess() const { return ess_; }
  std::int64_t evaluations() const { return evaluations_; }

 private:
  const Dataset* data_;
  double ess_;
  std::int64_t dense_limit_;
  std::int64_t evaluations_ = 0;
  std::map<std::pair<int, std::vector<int>>, double> cache_;
};

double bdeu_node_score(const Dataset& data, int child, const std::vector<int>& parents,
                       double ess);

// Sum of family scores under the DAG; per_node[i] is node i's family score.
ScoreValue bdeu_network_score(const Dataset& data, const Dag& dag, double ess);

}  // namespace netavg
