#include "netavg/bayes_net.hpp"

#include <cmath>
#include <cstdio>

#include "netavg/rng.hpp"

namespace netavg {

namespace {
constexpr double kRowSumTolerance = 1e-9;
constexpr double kRowSumRepairLimit = 1e-6;
constexpr std::size_t kMaxJointStates = 1000000;
}  // namespace

Cpt::Cpt(int child, std::vector<int> parents, std::vector<int> parent_cards, int child_card,
         std::vector<double> table)
    : child_(child),
      parents_(std::move(parents)),
      parent_cards_(std::move(parent_cards)),
      child_card_(child_card),
      table_(std::move(table)) {
  if (parents_.size() != parent_cards_.size())
    throw DataError("cpt parent list and cardinality list differ in length");
  if (child_card_ < 2) throw DataError("cpt child cardinality must be >= 2");
  std::size_t configs = 1;
  for (int card : parent_cards_) {
    if (card < 2) throw DataError("cpt parent cardinality must be >= 2");
    configs *= static_cast<std::size_t>(card);
  }
  n_configs_ = static_cast<int>(configs);
  if (table_.size() != configs * static_cast<std::size_t>(child_card_))
    throw DataError("cpt table has wrong shape: expected " +
                    std::to_string(configs * static_cast<std::size_t>(child_card_)) +
                    " cells, got " + std::to_string(table_.size()));

  for (int config = 0; config < n_configs_; ++config) {
    double sum = 0.0;
    for (int k = 0; k < child_card_; ++k) {
      const double p = probability(config, k);
      if (p < 0.0 || !std::isfinite(p))
        throw DataError("cpt row " + std::to_string(config) + " has invalid probability");
      sum += p;
    }
    const double err = std::fabs(sum - 1.0);
    if (err > kRowSumRepairLimit)
      throw DataError("cpt row " + std::to_string(config) + " sums to " + std::to_string(sum));
    if (err > kRowSumTolerance) {
      for (int k = 0; k < child_card_; ++k)
        table_[static_cast<std::size_t>(config) * static_cast<std::size_t>(child_card_) +
               static_cast<std::size_t>(k)] /= sum;
      renormalized_ = true;
    }
  }
}

int Cpt::config_for(const std::vector<std::int32_t>& assignment) const {
  int config = 0;
  for (std::size_t i = 0; i < parents_.size(); ++i)
    config = config * parent_cards_[i] + assignment[static_cast<std::size_t>(parents_[i])];
  return config;
}

DiscreteBayesNet::DiscreteBayesNet(Dag dag, std::vector<Variable> variables,
                                   std::vector<Cpt> cpts)
    : dag_(std::move(dag)), variables_(std::move(variables)), cpts_(std::move(cpts)) {
  const int n = dag_.node_count();
  if (static_cast<int>(variables_.size()) != n || static_cast<int>(cpts_.size()) != n)
    throw DataError("network needs one variable and one cpt per node");
  for (int i = 0; i < n; ++i) {
    const Cpt& cpt = cpts_[static_cast<std::size_t>(i)];
    if (cpt.child() != i) throw DataError("cpt order does not match node order");
    if (cpt.parents() != dag_.parents(i))
      throw DataError("cpt parents of " + variables_[static_cast<std::size_t>(i)].name +
                      " do not match graph parents");
    if (cpt.child_card() != variables_[static_cast<std::size_t>(i)].cardinality())
      throw DataError("cpt cardinality mismatch for " +
                      variables_[static_cast<std::size_t>(i)].name);
  }
  topological_sort(dag_);  // validates acyclicity
}

std::int64_t parameter_count(const DiscreteBayesNet& net) {
  std::int64_t total = 0;
  for (int i = 0; i < net.node_count(); ++i) {
    std::int64_t q = 1;
    for (int parent : net.dag().parents(i)) q *= net.variable(parent).cardinality();
    total += static_cast<std::int64_t>(net.variable(i).cardinality() - 1) * q;
  }
  return total;
}

Dataset forward_sample(const DiscreteBayesNet& net, int n, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample size must be >= 1");
  const std::vector<int> order = topological_sort(net.dag());
  const int n_nodes = net.node_count();

  std::vector<std::vector<std::int32_t>> columns(static_cast<std::size_t>(n_nodes));
  for (auto& col : columns) col.resize(static_cast<std::size_t>(n));

  Rng rng(seed);
  std::vector<std::int32_t> assignment(static_cast<std::size_t>(n_nodes));
  for (int row = 0; row < n; ++row) {
    for (int node : order) {
      const Cpt& cpt = net.cpt(node);
      const int config = cpt.config_for(assignment);
      const double u = rng.uniform();
      double cum = 0.0;
      int drawn = cpt.child_card() - 1;
      for (int k = 0; k < cpt.child_card(); ++k) {
        cum += cpt.probability(config, k);
        if (u < cum) {
          drawn = k;
          break;
        }
      }
      assignment[static_cast<std::size_t>(node)] = drawn;
      columns[static_cast<std::size_t>(node)][static_cast<std::size_t>(row)] = drawn;
    }
  }
  return Dataset(net.variables(), std::move(columns));
}

JointDistribution::JointDistribution(const DiscreteBayesNet& net) {
  const int n = net.node_count();
  cards_.reserve(static_cast<std::size_t>(n));
  std::size_t states = 1;
  for (int i = 0; i < n; ++i) {
    cards_.push_back(net.variable(i).cardinality());
    states *= static_cast<std::size_t>(cards_.back());
    if (states > kMaxJointStates)
      throw UsageError("joint state space exceeds " + std::to_string(kMaxJointStates) +
                       " configurations");
  }

  probabilities_.resize(states);
  std::vector<std::int32_t> assignment(static_cast<std::size_t>(n), 0);
  for (std::size_t config = 0; config < states; ++config) {
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      p *= net.cpt(i).probability(net.cpt(i).config_for(assignment),
                                  assignment[static_cast<std::size_t>(i)]);
    probabilities_[config] = p;
    // advance mixed-radix counter, last node fastest
    for (int i = n - 1; i >= 0; --i) {
      auto& v = assignment[static_cast<std::size_t>(i)];
      if (++v < cards_[static_cast<std::size_t>(i)]) break;
      v = 0;
    }
  }
}

std::size_t JointDistribution::config_of(const std::vector<std::int32_t>& assignment) const {
  std::size_t config = 0;
  for (std::size_t i = 0; i < cards_.size(); ++i)
    config = config * static_cast<std::size_t>(cards_[i]) + static_cast<std::size_t>(assignment[i]);
  return config;
}

std::vector<std::int32_t> JointDistribution::assignment_of(std::size_t config) const {
  std::vector<std::int32_t> assignment(cards_.size());
  for (std::size_t i = cards_.size(); i-- > 0;) {
    assignment[i] = static_cast<std::int32_t>(config % static_cast<std::size_t>(cards_[i]));
    config /= static_cast<std::size_t>(cards_[i]);
  }
  return assignment;
}

double JointDistribution::probability(const std::vector<std::int32_t>& assignment) const {
  return probabilities_[config_of(assignment)];
}

JointDistribution exact_joint(const DiscreteBayesNet& net) { return JointDistribution(net); }

}  // namespace netavg
