#pragma once

#include <cstdint>
#include <vector>

#include "netavg/dataset.hpp"
#include "netavg/graph.hpp"
#include "netavg/variable.hpp"

namespace netavg {

// Conditional probability table of one node. Rows index the joint parent
// configuration row-major over the parent list (first parent slowest); each
// row is a distribution over the child's levels.
class Cpt {
 public:
  Cpt() = default;
  // Rows with |sum - 1| in (1e-9, 1e-6] are renormalized (the loader warns);
  // larger errors are rejected.
  Cpt(int child, std::vector<int> parents, std::vector<int> parent_cards, int child_card,
      std::vector<double> table);

  int child() const { return child_; }
  const std::vector<int>& parents() const { return parents_; }
  int n_configs() const { return n_configs_; }
  int child_card() const { return child_card_; }
  bool renormalized() const { return renormalized_; }

  double probability(int config, int level) const {
    return table_[static_cast<std::size_t>(config) * static_cast<std::size_t>(child_card_) +
                  static_cast<std::size_t>(level)];
  }

  // Parent configuration index for one assignment of all node values.
  int config_for(const std::vector<std::int32_t>& assignment) const;

 private:
  int child_ = 0;
  std::vector<int> parents_;
  std::vector<int> parent_cards_;
  int child_card_ = 0;
  int n_configs_ = 0;
  bool renormalized_ = false;
  std::vector<double> table_;
};

// Dag plus one Cpt per node. Immutable and shareable across threads.
class DiscreteBayesNet {
 public:
  DiscreteBayesNet(Dag dag, std::vector<Variable> variables, std::vector<Cpt> cpts);

  const Dag& dag() const { return dag_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int i) const { return variables_[static_cast<std::size_t>(i)]; }
  const Cpt& cpt(int i) const { return cpts_[static_cast<std::size_t>(i)]; }
  int node_count() const { return dag_.node_count(); }

 private:
  Dag dag_;
  std::vector<Variable> variables_;
  std::vector<Cpt> cpts_;
};

// Free parameters p = sum_i (r_i - 1) * prod_{j in parents(i)} r_j.
std::int64_t parameter_count(const DiscreteBayesNet& net);

// n i.i.d. rows via ancestral sampling; categorical draws are inverse-CDF on
// the CPT row in level order, so (net, n, seed) pins the byte-exact output.
Dataset forward_sample(const DiscreteBayesNet& net, int n, std::uint64_t seed);

// Full joint by enumeration, indexed row-major over node levels in canonical
// node order (first node slowest). Test oracle; rejects state spaces > 10^6.
class JointDistribution {
 public:
  explicit JointDistribution(const DiscreteBayesNet& net);

  std::size_t size() const { return probabilities_.size(); }
  double probability(std::size_t config) const { return probabilities_[config]; }
  double probability(const std::vector<std::int32_t>& assignment) const;

  std::size_t config_of(const std::vector<std::int32_t>& assignment) const;
  std::vector<std::int32_t> assignment_of(std::size_t config) const;

 private:
  std::vector<int> cards_;
  std::vector<double> probabilities_;
};

JointDistribution exact_joint(const DiscreteBayesNet& net);

}  // namespace netavg
