#include "netavg/learn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <unordered_set>

#include "netavg/error.hpp"
#include "netavg/independence.hpp"
#include "netavg/rng.hpp"
#include "netavg/scores.hpp"

namespace netavg {

namespace {

constexpr double kScoreTolerance = 1e-9;

void validate_config(const Dataset& data, const LearnerConfig& config) {
  if (data.column_count() < 2) throw UsageError("structure learning needs at least 2 columns");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw UsageError("alpha must lie strictly between 0 and 1");
  }
  if (!(config.ess > 0.0)) throw UsageError("equivalent sample size must be positive");
  if (config.restarts < 0) throw UsageError("restart count must be nonnegative");
  if (config.tabu < 0) throw UsageError("tabu length must be nonnegative");
  if (config.max_parents && *config.max_parents < 0) {
    throw UsageError("parent cap must be nonnegative");
  }
}

using TestFn = std::function<CiTestResult(int, int, const std::vector<int>&)>;

TestFn make_test(const Dataset& data, const LearnerConfig& config, std::int64_t& counter) {
  if (config.test == CiTestKind::MlG2) {
    return [&data, &counter](int x, int y, const std::vector<int>& z) {
      ++counter;
      return mi_g2_test(data, x, y, z);
    };
  }
  return [&data, &counter](int x, int y, const std::vector<int>& z) {
    ++counter;
    return mi_shrinkage_test(data, x, y, z);
  };
}

// Subsets of pool, size-ascending then lexicographic by position. The visitor
// returns true to stop early.
bool for_each_subset(const std::vector<int>& pool,
                     const std::function<bool(const std::vector<int>&)>& visit) {
  const int n = static_cast<int>(pool.size());
  std::vector<int> subset;
  if (visit(subset)) return true;
  std::vector<int> idx;
  for (int size = 1; size <= n; ++size) {
    idx.resize(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
      subset.clear();
      for (int i : idx) subset.push_back(pool[static_cast<std::size_t>(i)]);
      if (visit(subset)) return true;
      int pos = size - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - size + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < size; ++i) {
        idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Score-based search.

struct Move {
  enum Kind { kAdd, kDelete, kReverse } kind = kAdd;
  int u = -1;
  int v = -1;
  double delta = 0.0;
};

class HillClimber {
 public:
  HillClimber(BdeuScorer& scorer, std::optional<int> max_parents,
              std::vector<bool> allowed_pairs)
      : scorer_(&scorer),
        max_parents_(max_parents),
        allowed_pairs_(std::move(allowed_pairs)),
        n_(scorer.data().column_count()),
        dag_(scorer.data().node_set()) {
    reset(dag_);
  }

  void reset(const Dag& start) {
    dag_ = start;
    local_.assign(static_cast<std::size_t>(n_), 0.0);
    total_ = 0.0;
    for (int i = 0; i < n_; ++i) {
      local_[static_cast<std::size_t>(i)] = family(i, dag_.parents(i));
      total_ += local_[static_cast<std::size_t>(i)];
    }
  }

  const Dag& dag() const { return dag_; }
  double total() const { return total_; }

  // Best strictly-improving move until none remains.
  void greedy() {
    Move move;
    while (find_best_move(move, nullptr) && move.delta > kScoreTolerance) apply(move);
  }

  // Best move even when not improving, avoiding recently seen edge sets.
  // Keeps the best graph encountered; call greedy() afterwards to restore
  // local optimality.
  void tabu_walk(int steps) {
    std::deque<std::uint64_t> recent;
    std::unordered_set<std::uint64_t> banned;
    auto remember = [&](std::uint64_t h) {
      recent.push_back(h);
      banned.insert(h);
      if (static_cast<int>(recent.size()) > steps + 1) {
        banned.erase(recent.front());
        recent.pop_front();
      }
    };
    remember(state_hash());

    Dag best = dag_;
    double best_total = total_;
    for (int step = 0; step < steps; ++step) {
      Move move;
      if (!find_best_move(move, &banned)) break;
      apply(move);
      remember(state_hash());
      if (total_ > best_total + kScoreTolerance) {
        best = dag_;
        best_total = total_;
      }
    }
    if (best_total > total_ + kScoreTolerance) reset(best);
  }

  // Random structural perturbation used between restarts.
  void perturb(Rng& rng, int operations) {
    for (int op = 0; op < operations; ++op) {
      const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_)));
      int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_ - 1)));
      if (v >= u) ++v;
      if (dag_.has_edge(u, v)) {
        dag_.remove_edge(u, v);
      } else if (pair_allowed(u, v) && !dag_.has_edge(v, u) && !dag_.would_create_cycle(u, v) &&
                 parent_slot_free(v)) {
        dag_.add_edge(u, v);
      }
    }
    reset(dag_);
  }

 private:
  double family(int child, const std::vector<int>& parents) {
    return scorer_->family_score(child, parents);
  }

  bool pair_allowed(int u, int v) const {
    if (allowed_pairs_.empty()) return true;
    return allowed_pairs_[static_cast<std::size_t>(pair_index(n_, u, v))];
  }

  bool parent_slot_free(int child) const {
    return !max_parents_ ||
           static_cast<int>(dag_.parents(child).size()) < *max_parents_;
  }

  std::uint64_t state_hash() const {
    std::uint64_t h = 0x243f6a8885a308d3ull;
    for (const auto& [u, v] : dag_.edges()) {
      h = mix64(h ^ mix64((static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v)));
    }
    return h;
  }

  static std::vector<int> with_parent(const std::vector<int>& parents, int extra) {
    std::vector<int> out = parents;
    out.insert(std::lower_bound(out.begin(), out.end(), extra), extra);
    return out;
  }

  static std::vector<int> without_parent(const std::vector<int>& parents, int removed) {
    std::vector<int> out = parents;
    out.erase(std::find(out.begin(), out.end(), removed));
    return out;
  }

  // Scans additions, deletions, then reversals in a fixed lexicographic
  // order; the first move with the strictly largest delta wins, so equal
  // deltas resolve canonically.
  bool find_best_move(Move& best, const std::unordered_set<std::uint64_t>* banned) {
    bool found = false;
    best.delta = -std::numeric_limits<double>::infinity();
    auto consider = [&](Move::Kind kind, int u, int v, double delta) {
      if (found && delta <= best.delta) return;
      if (banned) {
        Move candidate{kind, u, v, delta};
        apply_to_dag(candidate);
        const std::uint64_t h = state_hash();
        unapply_from_dag(candidate);
        if (banned->count(h)) return;
      }
      best = Move{kind, u, v, delta};
      found = true;
    };

    for (int u = 0; u < n_; ++u) {
      for (int v = 0; v < n_; ++v) {
        if (u == v || dag_.has_edge(u, v) || dag_.has_edge(v, u)) continue;
        if (!pair_allowed(u, v) || !parent_slot_free(v)) continue;
        if (dag_.would_create_cycle(u, v)) continue;
        const double delta =
            family(v, with_parent(dag_.parents(v), u)) - local_[static_cast<std::size_t>(v)];
        consider(Move::kAdd, u, v, delta);
      }
    }
    for (const auto& [u, v] : dag_.edges()) {
      const double delta =
          family(v, without_parent(dag_.parents(v), u)) - local_[static_cast<std::size_t>(v)];
      consider(Move::kDelete, u, v, delta);
    }
    for (const auto& [u, v] : dag_.edges()) {
      if (!parent_slot_free(u)) continue;
      dag_.remove_edge(u, v);
      const bool cycles = dag_.would_create_cycle(v, u);
      dag_.add_edge(u, v);
      if (cycles) continue;
      const double delta = family(u, with_parent(dag_.parents(u), v)) -
                           local_[static_cast<std::size_t>(u)] +
                           family(v, without_parent(dag_.parents(v), u)) -
                           local_[static_cast<std::size_t>(v)];
      consider(Move::kReverse, u, v, delta);
    }
    return found;
  }

  void apply_to_dag(const Move& move) {
    switch (move.kind) {
      case Move::kAdd: dag_.add_edge(move.u, move.v); break;
      case Move::kDelete: dag_.remove_edge(move.u, move.v); break;
      case Move::kReverse: dag_.reverse_edge(move.u, move.v); break;
    }
  }

  void unapply_from_dag(const Move& move) {
    switch (move.kind) {
      case Move::kAdd: dag_.remove_edge(move.u, move.v); break;
      case Move::kDelete: dag_.add_edge(move.u, move.v); break;
      case Move::kReverse: dag_.reverse_edge(move.v, move.u); break;
    }
  }

  void apply(const Move& move) {
    apply_to_dag(move);
    const auto refresh = [&](int node) {
      const double updated = family(node, dag_.parents(node));
      total_ += updated - local_[static_cast<std::size_t>(node)];
      local_[static_cast<std::size_t>(node)] = updated;
    };
    refresh(move.v);
    if (move.kind == Move::kReverse) refresh(move.u);
  }

  BdeuScorer* scorer_;
  std::optional<int> max_parents_;
  std::vector<bool> allowed_pairs_;
  int n_;
  Dag dag_;
  std::vector<double> local_;
  double total_ = 0.0;
};

LearnedStructure run_hill_climb(const Dataset& data, const LearnerConfig& config,
                                std::vector<bool> allowed_pairs,
                                std::int64_t base_ci_tests) {
  BdeuScorer scorer(data, config.ess);
  HillClimber climber(scorer, config.max_parents, std::move(allowed_pairs));
  climber.greedy();

  Dag best = climber.dag();
  double best_total = climber.total();
  for (int r = 1; r <= config.restarts; ++r) {
    Rng rng(derive_seed(derive_seed(config.seed, seed_stream::kRestart),
                        static_cast<std::uint64_t>(r)));
    climber.reset(best);
    climber.perturb(rng, 2 * data.column_count());
    climber.greedy();
    if (climber.total() > best_total + kScoreTolerance) {
      best = climber.dag();
      best_total = climber.total();
    }
  }

  if (config.tabu > 0) {
    climber.reset(best);
    climber.tabu_walk(config.tabu);
    climber.greedy();
    if (climber.total() > best_total + kScoreTolerance) {
      best = climber.dag();
      best_total = climber.total();
    }
  }

  LearnedStructure out{best, {}};
  out.diagnostics.score_evaluations = scorer.evaluations();
  out.diagnostics.ci_tests = base_ci_tests;
  double total = 0.0;
  for (int i = 0; i < best.node_count(); ++i) total += scorer.family_score(i, best.parents(i));
  out.diagnostics.final_score = total;
  return out;
}

// ---------------------------------------------------------------------------
// Constraint-based pieces.

std::vector<int> grow_shrink_blanket(int x, int n, double alpha, const TestFn& test) {
  std::vector<int> blanket;
  const auto member = [&](int y) {
    return std::binary_search(blanket.begin(), blanket.end(), y);
  };

  for (;;) {
    int best = -1;
    double best_p = std::numeric_limits<double>::infinity();
    for (int y = 0; y < n; ++y) {
      if (y == x || member(y)) continue;
      const double p = test(x, y, blanket).p_value;
      if (p < best_p) {
        best_p = p;
        best = y;
      }
    }
    if (best < 0 || best_p >= alpha) break;
    blanket.insert(std::lower_bound(blanket.begin(), blanket.end(), best), best);
  }

  for (;;) {
    int drop = -1;
    double drop_p = -1.0;
    for (int y : blanket) {
      std::vector<int> rest;
      rest.reserve(blanket.size() - 1);
      for (int b : blanket) {
        if (b != y) rest.push_back(b);
      }
      const double p = test(x, y, rest).p_value;
      if (p >= alpha && p > drop_p) {
        drop_p = p;
        drop = y;
      }
    }
    if (drop < 0) break;
    blanket.erase(std::find(blanket.begin(), blanket.end(), drop));
  }
  return blanket;
}

void symmetrize_and(std::vector<std::vector<int>>& sets) {
  const int n = static_cast<int>(sets.size());
  std::vector<std::vector<int>> kept(sets.size());
  for (int x = 0; x < n; ++x) {
    for (int y : sets[static_cast<std::size_t>(x)]) {
      const auto& back = sets[static_cast<std::size_t>(y)];
      if (std::binary_search(back.begin(), back.end(), x)) {
        kept[static_cast<std::size_t>(x)].push_back(y);
      }
    }
  }
  sets = std::move(kept);
}

// Orientation state per skeleton pair: 0 undecided, 1 low->high, 2 high->low.
struct Pattern {
  int n = 0;
  Skeleton skeleton;
  std::vector<std::uint8_t> direction;

  explicit Pattern(const Skeleton& s)
      : n(s.node_count()),
        skeleton(s),
        direction(static_cast<std::size_t>(possible_edge_count(s.node_count())), 0) {}

  bool adjacent(int a, int b) const { return skeleton.contains(a, b); }
  bool directed(int from, int to) const {
    const int idx = pair_index(n, from, to);
    if (!skeleton.contains_index(idx)) return false;
    return direction[static_cast<std::size_t>(idx)] == (from < to ? 1 : 2);
  }
  bool undirected(int a, int b) const {
    const int idx = pair_index(n, a, b);
    return skeleton.contains_index(idx) && direction[static_cast<std::size_t>(idx)] == 0;
  }
  // Only orients currently-undecided pairs; first decision wins.
  bool orient(int from, int to) {
    const int idx = pair_index(n, from, to);
    if (!skeleton.contains_index(idx) || direction[static_cast<std::size_t>(idx)] != 0) {
      return false;
    }
    direction[static_cast<std::size_t>(idx)] = from < to ? 1 : 2;
    return true;
  }
};

void apply_meek_rules(Pattern& g) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b = 0; b < g.n; ++b) {
      for (int c = 0; c < g.n; ++c) {
        if (b == c || !g.undirected(b, c)) continue;
        // a -> b with a not adjacent to c forces b -> c.
        for (int a = 0; a < g.n; ++a) {
          if (a == b || a == c) continue;
          if (g.directed(a, b) && !g.adjacent(a, c)) {
            changed |= g.orient(b, c);
            break;
          }
        }
        if (!g.undirected(b, c)) continue;
        // b -> d -> c forces b -> c, else the eventual DAG would cycle.
        for (int d = 0; d < g.n; ++d) {
          if (d == b || d == c) continue;
          if (g.directed(b, d) && g.directed(d, c)) {
            changed |= g.orient(b, c);
            break;
          }
        }
      }
    }
  }
}

Dag pattern_to_dag(const Pattern& g) {
  Dag dag(g.skeleton.nodes());
  const auto try_add = [&](int from, int to) {
    if (dag.would_create_cycle(from, to)) return false;
    dag.add_edge(from, to);
    return true;
  };
  // Hard orientations first, in canonical pair order. A pair blocked in both
  // directions would need a pre-existing cycle, which add_edge rules out.
  for (const auto& [a, b] : g.skeleton.edges()) {
    const std::uint8_t dir = g.direction[static_cast<std::size_t>(pair_index(g.n, a, b))];
    if (dir == 0) continue;
    const int from = dir == 1 ? a : b;
    const int to = dir == 1 ? b : a;
    if (!try_add(from, to)) try_add(to, from);
  }
  for (const auto& [a, b] : g.skeleton.edges()) {
    if (g.direction[static_cast<std::size_t>(pair_index(g.n, a, b))] != 0) continue;
    if (!try_add(a, b)) try_add(b, a);
  }
  return dag;
}

struct SepsetMap {
  std::map<int, std::vector<int>> by_pair;

  void record(int n, int a, int b, const std::vector<int>& sep) {
    by_pair.emplace(pair_index(n, a, b), sep);
  }
  const std::vector<int>* find(int n, int a, int b) const {
    const auto it = by_pair.find(pair_index(n, a, b));
    return it == by_pair.end() ? nullptr : &it->second;
  }
};

// Within symmetrized blankets: {x,y} is an edge unless some subset of the
// smaller surrounding blanket separates them; the separating set feeds
// v-structure detection.
Skeleton blanket_skeleton(const NodeSet& nodes, const std::vector<std::vector<int>>& blankets,
                          double alpha, const TestFn& test, SepsetMap& sepsets) {
  const int n = static_cast<int>(blankets.size());
  Skeleton skeleton(nodes);
  for (int x = 0; x < n; ++x) {
    for (int y : blankets[static_cast<std::size_t>(x)]) {
      if (y <= x) continue;
      std::vector<int> pool_x;
      for (int b : blankets[static_cast<std::size_t>(x)]) {
        if (b != y) pool_x.push_back(b);
      }
      std::vector<int> pool_y;
      for (int b : blankets[static_cast<std::size_t>(y)]) {
        if (b != x) pool_y.push_back(b);
      }
      const std::vector<int>& pool = pool_y.size() < pool_x.size() ? pool_y : pool_x;

      bool separated = false;
      for_each_subset(pool, [&](const std::vector<int>& s) {
        if (test(x, y, s).p_value >= alpha) {
          separated = true;
          sepsets.record(n, x, y, s);
          return true;
        }
        return false;
      });
      if (!separated) skeleton.insert(x, y);
    }
  }
  return skeleton;
}

void orient_v_structures(Pattern& g, const SepsetMap& sepsets) {
  for (int y = 0; y < g.n; ++y) {
    for (int x = 0; x < g.n; ++x) {
      if (x == y || !g.adjacent(x, y)) continue;
      for (int z = x + 1; z < g.n; ++z) {
        if (z == y || !g.adjacent(z, y) || g.adjacent(x, z)) continue;
        const std::vector<int>* sep = sepsets.find(g.n, x, z);
        if (!sep) continue;
        if (std::binary_search(sep->begin(), sep->end(), y)) continue;
        g.orient(x, y);
        g.orient(z, y);
      }
    }
  }
}

std::vector<std::vector<int>> mmpc_sets(const Dataset& data, const LearnerConfig& config,
                                        const TestFn& test) {
  const int n = data.column_count();
  std::vector<std::vector<int>> cpc(static_cast<std::size_t>(n));

  for (int x = 0; x < n; ++x) {
    std::vector<int>& set = cpc[static_cast<std::size_t>(x)];
    std::vector<double> max_p(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> excluded(static_cast<std::size_t>(n), false);
    excluded[static_cast<std::size_t>(x)] = true;

    for (int y = 0; y < n; ++y) {
      if (excluded[static_cast<std::size_t>(y)]) continue;
      max_p[static_cast<std::size_t>(y)] = test(x, y, {}).p_value;
      if (max_p[static_cast<std::size_t>(y)] >= config.alpha) {
        excluded[static_cast<std::size_t>(y)] = true;
      }
    }

    for (;;) {
      int pick = -1;
      double pick_p = std::numeric_limits<double>::infinity();
      for (int y = 0; y < n; ++y) {
        if (excluded[static_cast<std::size_t>(y)] ||
            std::binary_search(set.begin(), set.end(), y)) {
          continue;
        }
        if (max_p[static_cast<std::size_t>(y)] < pick_p) {
          pick_p = max_p[static_cast<std::size_t>(y)];
          pick = y;
        }
      }
      if (pick < 0 || pick_p >= config.alpha) break;

      std::vector<int> others = set;  // subsets not containing the new member
      set.insert(std::lower_bound(set.begin(), set.end(), pick), pick);

      for (int y = 0; y < n; ++y) {
        if (excluded[static_cast<std::size_t>(y)] ||
            std::binary_search(set.begin(), set.end(), y)) {
          continue;
        }
        double& mp = max_p[static_cast<std::size_t>(y)];
        for_each_subset(others, [&](const std::vector<int>& s) {
          std::vector<int> cond = s;
          cond.insert(std::lower_bound(cond.begin(), cond.end(), pick), pick);
          mp = std::max(mp, test(x, y, cond).p_value);
          if (mp >= config.alpha) {
            excluded[static_cast<std::size_t>(y)] = true;
            return true;
          }
          return false;
        });
      }
    }

    // Backward pass: drop members separated by some subset of the rest.
    for (int pass_y : std::vector<int>(set)) {
      std::vector<int> rest;
      for (int b : set) {
        if (b != pass_y) rest.push_back(b);
      }
      bool separated = false;
      for_each_subset(rest, [&](const std::vector<int>& s) {
        if (test(x, pass_y, s).p_value >= config.alpha) {
          separated = true;
          return true;
        }
        return false;
      });
      if (separated) set.erase(std::find(set.begin(), set.end(), pass_y));
    }
  }

  symmetrize_and(cpc);
  return cpc;
}

}  // namespace

LearnedStructure hill_climb(const Dataset& data, const LearnerConfig& config) {
  validate_config(data, config);
  return run_hill_climb(data, config, {}, 0);
}

std::vector<std::vector<int>> iamb_markov_blankets(const Dataset& data,
                                                   const LearnerConfig& config,
                                                   std::int64_t* ci_tests) {
  validate_config(data, config);
  std::int64_t count = 0;
  const TestFn test = make_test(data, config, count);
  const int n = data.column_count();
  std::vector<std::vector<int>> blankets(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    blankets[static_cast<std::size_t>(x)] = grow_shrink_blanket(x, n, config.alpha, test);
  }
  symmetrize_and(blankets);
  if (ci_tests) *ci_tests += count;
  return blankets;
}

LearnedStructure iamb(const Dataset& data, const LearnerConfig& config) {
  validate_config(data, config);
  std::int64_t count = 0;
  const TestFn test = make_test(data, config, count);

  const int n = data.column_count();
  std::vector<std::vector<int>> blankets(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    blankets[static_cast<std::size_t>(x)] = grow_shrink_blanket(x, n, config.alpha, test);
  }
  symmetrize_and(blankets);

  SepsetMap sepsets;
  Pattern pattern(blanket_skeleton(data.node_set(), blankets, config.alpha, test, sepsets));
  orient_v_structures(pattern, sepsets);
  apply_meek_rules(pattern);

  LearnedStructure out{pattern_to_dag(pattern), {}};
  out.diagnostics.ci_tests = count;
  return out;
}

std::vector<std::vector<int>> mmpc_candidate_sets(const Dataset& data,
                                                  const LearnerConfig& config,
                                                  std::int64_t* ci_tests) {
  validate_config(data, config);
  std::int64_t count = 0;
  const TestFn test = make_test(data, config, count);
  auto sets = mmpc_sets(data, config, test);
  if (ci_tests) *ci_tests += count;
  return sets;
}

LearnedStructure mmhc(const Dataset& data, const LearnerConfig& config) {
  validate_config(data, config);
  std::int64_t count = 0;
  const TestFn test = make_test(data, config, count);
  const auto cpc = mmpc_sets(data, config, test);

  const int n = data.column_count();
  std::vector<bool> allowed(static_cast<std::size_t>(possible_edge_count(n)), false);
  for (int x = 0; x < n; ++x) {
    for (int y : cpc[static_cast<std::size_t>(x)]) {
      if (y > x) allowed[static_cast<std::size_t>(pair_index(n, x, y))] = true;
    }
  }
  return run_hill_climb(data, config, std::move(allowed), count);
}

LearnedStructure learn_structure(const Dataset& data, const LearnerConfig& config) {
  switch (config.algorithm) {
    case Algorithm::HillClimb: return hill_climb(data, config);
    case Algorithm::Iamb: return iamb(data, config);
    case Algorithm::Mmhc: return mmhc(data, config);
  }
  throw UsageError("unknown learning algorithm");
}

}  // namespace netavg
