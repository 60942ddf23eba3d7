#include "netavg/graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace netavg {

namespace {

std::string join_names(const NodeSet& nodes, const std::vector<int>& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out << " -> ";
    out << nodes.name(path[i]);
  }
  return out.str();
}

void insert_sorted(std::vector<int>& values, int v) {
  values.insert(std::lower_bound(values.begin(), values.end(), v), v);
}

void erase_sorted(std::vector<int>& values, int v) {
  auto it = std::lower_bound(values.begin(), values.end(), v);
  values.erase(it);
}

}  // namespace

NodeSet::NodeSet(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw DataError("node names must be non-empty");
    if (!seen.insert(name).second)
      throw DataError("duplicate node name: " + name);
  }
}

int NodeSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

int pair_index(int n_nodes, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_nodes || i == j)
    throw std::invalid_argument("pair_index: invalid node pair");
  // pairs (0,1)..(0,N-1) first, then (1,2).. etc.
  return i * n_nodes - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_from_index(int n_nodes, int index) {
  if (index < 0 || index >= possible_edge_count(n_nodes))
    throw std::invalid_argument("pair_from_index: index out of range");
  int i = 0;
  int block = n_nodes - 1;
  while (index >= block) {
    index -= block;
    ++i;
    --block;
  }
  return {i, i + 1 + index};
}

std::vector<std::pair<int, int>> enumerate_possible_edges(const NodeSet& nodes) {
  const int n = nodes.size();
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(possible_edge_count(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

Dag::Dag(NodeSet nodes)
    : nodes_(std::move(nodes)),
      parents_(static_cast<std::size_t>(nodes_.size())),
      children_(static_cast<std::size_t>(nodes_.size())) {}

Dag Dag::with_edges(NodeSet nodes, const std::vector<std::pair<int, int>>& edges) {
  Dag dag(std::move(nodes));
  for (const auto& [u, v] : edges) dag.add_edge(u, v);
  return dag;
}

void Dag::check_node(int node) const {
  if (node < 0 || node >= nodes_.size())
    throw std::invalid_argument("node index out of range");
}

bool Dag::has_edge(int parent, int child) const {
  check_node(parent);
  check_node(child);
  const auto& ps = parents_[static_cast<std::size_t>(child)];
  return std::binary_search(ps.begin(), ps.end(), parent);
}

std::vector<std::pair<int, int>> Dag::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (int u = 0; u < nodes_.size(); ++u)
    for (int v : children_[static_cast<std::size_t>(u)]) out.emplace_back(u, v);
  return out;
}

bool Dag::would_create_cycle(int parent, int child) const {
  check_node(parent);
  check_node(child);
  if (parent == child) return true;
  // DFS over descendants of `child` looking for `parent`.
  std::vector<int> stack{child};
  std::vector<bool> seen(static_cast<std::size_t>(nodes_.size()), false);
  seen[static_cast<std::size_t>(child)] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (u == parent) return true;
    for (int v : children_[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return false;
}

void Dag::add_edge(int parent, int child) {
  check_node(parent);
  check_node(child);
  if (parent == child)
    throw DataError("self-loop on node " + nodes_.name(parent));
  if (has_edge(parent, child))
    throw DataError("duplicate edge " + nodes_.name(parent) + " -> " + nodes_.name(child));
  if (would_create_cycle(parent, child)) {
    // Reconstruct a child ~> parent path for the error message.
    std::vector<int> path{child};
    std::vector<int> parent_of(static_cast<std::size_t>(nodes_.size()), -1);
    std::vector<int> stack{child};
    std::vector<bool> seen(static_cast<std::size_t>(nodes_.size()), false);
    seen[static_cast<std::size_t>(child)] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (u == parent) break;
      for (int v : children_[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = true;
          parent_of[static_cast<std::size_t>(v)] = u;
          stack.push_back(v);
        }
      }
    }
    std::vector<int> cycle;
    for (int u = parent; u != -1; u = parent_of[static_cast<std::size_t>(u)]) cycle.push_back(u);
    std::reverse(cycle.begin(), cycle.end());  // child ... parent
    cycle.push_back(child);                    // close via the new edge
    throw CycleError("adding edge " + nodes_.name(parent) + " -> " + nodes_.name(child) +
                         " creates cycle: " + join_names(nodes_, cycle),
                     cycle);
  }
  insert_sorted(parents_[static_cast<std::size_t>(child)], parent);
  insert_sorted(children_[static_cast<std::size_t>(parent)], child);
  ++edge_count_;
}

void Dag::remove_edge(int parent, int child) {
  if (!has_edge(parent, child))
    throw DataError("no edge " + nodes_.name(parent) + " -> " + nodes_.name(child));
  erase_sorted(parents_[static_cast<std::size_t>(child)], parent);
  erase_sorted(children_[static_cast<std::size_t>(parent)], child);
  --edge_count_;
}

void Dag::reverse_edge(int parent, int child) {
  remove_edge(parent, child);
  try {
    add_edge(child, parent);
  } catch (...) {
    add_edge(parent, child);  // restore
    throw;
  }
}

bool Dag::operator==(const Dag& other) const {
  return nodes_ == other.nodes_ && parents_ == other.parents_;
}

Skeleton::Skeleton(NodeSet nodes)
    : nodes_(std::move(nodes)),
      present_(static_cast<std::size_t>(possible_edge_count(nodes_.size())), false) {}

bool Skeleton::contains(int i, int j) const {
  return present_[static_cast<std::size_t>(pair_index(nodes_.size(), i, j))];
}

void Skeleton::insert(int i, int j) {
  auto slot = static_cast<std::size_t>(pair_index(nodes_.size(), i, j));
  if (!present_[slot]) {
    present_[slot] = true;
    ++edge_count_;
  }
}

std::vector<std::pair<int, int>> Skeleton::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (int idx = 0; idx < static_cast<int>(present_.size()); ++idx)
    if (present_[static_cast<std::size_t>(idx)])
      out.push_back(pair_from_index(nodes_.size(), idx));
  return out;
}

std::vector<int> Skeleton::edge_indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (int idx = 0; idx < static_cast<int>(present_.size()); ++idx)
    if (present_[static_cast<std::size_t>(idx)]) out.push_back(idx);
  return out;
}

bool Skeleton::operator==(const Skeleton& other) const {
  return nodes_ == other.nodes_ && present_ == other.present_;
}

std::vector<int> topological_sort(const Dag& dag) {
  const int n = dag.node_count();
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v)
    indegree[static_cast<std::size_t>(v)] = static_cast<int>(dag.parents(v).size());

  std::set<int> ready;
  for (int v = 0; v < n; ++v)
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.insert(v);

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!ready.empty()) {
    const int u = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(u);
    for (int v : dag.children(u)) {
      if (--indegree[static_cast<std::size_t>(v)] == 0) ready.insert(v);
    }
  }
  if (static_cast<int>(order.size()) == n) return order;

  // Some nodes remain on a cycle; walk parents until one repeats.
  std::vector<bool> remaining(static_cast<std::size_t>(n), true);
  for (int u : order) remaining[static_cast<std::size_t>(u)] = false;
  int start = 0;
  while (!remaining[static_cast<std::size_t>(start)]) ++start;

  std::vector<int> path;
  std::vector<int> pos_in_path(static_cast<std::size_t>(n), -1);
  int u = start;
  while (pos_in_path[static_cast<std::size_t>(u)] == -1) {
    pos_in_path[static_cast<std::size_t>(u)] = static_cast<int>(path.size());
    path.push_back(u);
    for (int p : dag.parents(u)) {
      if (remaining[static_cast<std::size_t>(p)]) {
        u = p;
        break;
      }
    }
  }
  std::vector<int> cycle(path.begin() + pos_in_path[static_cast<std::size_t>(u)], path.end());
  std::reverse(cycle.begin(), cycle.end());  // follow edge direction
  cycle.push_back(cycle.front());
  throw CycleError("cycle detected: " + join_names(dag.nodes(), cycle), cycle);
}

Skeleton skeleton_of(const Dag& dag) {
  Skeleton skel(dag.nodes());
  for (const auto& [u, v] : dag.edges()) skel.insert(u, v);
  return skel;
}

}  // namespace netavg
