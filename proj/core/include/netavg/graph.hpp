#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netavg/error.hpp"

namespace netavg {

// Fixed, ordered set of variable names. Declaration order defines the
// canonical node indices used for all iteration and tie-breaking.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& names() const { return names_; }

  // -1 when the name is unknown.
  int index_of(const std::string& name) const;

  bool operator==(const NodeSet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
};

// Index of the unordered pair {i, j} in the canonical enumeration of the
// N(N-1)/2 possible edges: (0,1), (0,2), ..., (0,N-1), (1,2), ...
inline int possible_edge_count(int n_nodes) { return n_nodes * (n_nodes - 1) / 2; }

int pair_index(int n_nodes, int i, int j);
std::pair<int, int> pair_from_index(int n_nodes, int index);

// All N(N-1)/2 unordered pairs in canonical order.
std::vector<std::pair<int, int>> enumerate_possible_edges(const NodeSet& nodes);

// Directed acyclic graph over a NodeSet. Value type: copy before mutating an
// instance shared across threads. Mutations re-check acyclicity.
class Dag {
 public:
  Dag() = default;
  explicit Dag(NodeSet nodes);

  // Validates every edge (self-loops, duplicates, cycles).
  static Dag with_edges(NodeSet nodes, const std::vector<std::pair<int, int>>& edges);

  int node_count() const { return nodes_.size(); }
  const NodeSet& nodes() const { return nodes_; }

  bool has_edge(int parent, int child) const;
  const std::vector<int>& parents(int node) const { return parents_[static_cast<std::size_t>(node)]; }
  const std::vector<int>& children(int node) const { return children_[static_cast<std::size_t>(node)]; }
  int edge_count() const { return edge_count_; }

  // Directed edges sorted by (parent, child).
  std::vector<std::pair<int, int>> edges() const;

  // True when adding parent -> child would close a directed cycle, i.e. a
  // path child ~> parent already exists.
  bool would_create_cycle(int parent, int child) const;

  void add_edge(int parent, int child);
  void remove_edge(int parent, int child);
  void reverse_edge(int parent, int child);

  bool operator==(const Dag& other) const;

 private:
  void check_node(int node) const;

  NodeSet nodes_;
  std::vector<std::vector<int>> parents_;   // sorted
  std::vector<std::vector<int>> children_;  // sorted
  int edge_count_ = 0;
};

// Undirected projection of an edge set over a NodeSet. Membership is tracked
// per canonical pair index.
class Skeleton {
 public:
  Skeleton() = default;
  explicit Skeleton(NodeSet nodes);

  int node_count() const { return nodes_.size(); }
  const NodeSet& nodes() const { return nodes_; }

  bool contains(int i, int j) const;
  bool contains_index(int pair_idx) const { return present_[static_cast<std::size_t>(pair_idx)]; }
  void insert(int i, int j);

  int edge_count() const { return edge_count_; }

  // Unordered pairs (i < j) in canonical order.
  std::vector<std::pair<int, int>> edges() const;
  // Canonical pair indices, ascending.
  std::vector<int> edge_indices() const;

  bool operator==(const Skeleton& other) const;

 private:
  NodeSet nodes_;
  std::vector<bool> present_;
  int edge_count_ = 0;
};

// Deterministic Kahn order: among ready nodes, the lowest canonical index
// comes first. Throws CycleError naming one offending cycle.
std::vector<int> topological_sort(const Dag& dag);

Skeleton skeleton_of(const Dag& dag);

}  // namespace netavg
