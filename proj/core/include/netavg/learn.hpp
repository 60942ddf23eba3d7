#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netavg/dataset.hpp"
#include "netavg/graph.hpp"

namespace netavg {

enum class Algorithm { HillClimb, Iamb, Mmhc };
enum class CiTestKind { ShrinkageMi, MlG2 };

struct LearnerConfig {
  Algorithm algorithm = Algorithm::HillClimb;
  double alpha = 0.05;
  double ess = 10.0;
  CiTestKind test = CiTestKind::ShrinkageMi;
  int restarts = 0;
  int tabu = 0;
  std::optional<int> max_parents;
  std::uint64_t seed = 0;
};

struct LearnDiagnostics {
  std::int64_t score_evaluations = 0;
  std::int64_t ci_tests = 0;
  std::optional<double> final_score;  // family-score total for score-guided searches
};

struct LearnedStructure {
  Dag dag;
  LearnDiagnostics diagnostics;
};

// Greedy single-edge search (add, delete, reverse) from the empty graph under
// the BDeu score; stops when no move improves by more than 1e-9. Optional
// random restarts and a tabu walk explore further but the returned graph is
// always a local optimum.
LearnedStructure hill_climb(const Dataset& data, const LearnerConfig& config);

// Markov-blanket discovery per node (incremental association: grow on the
// smallest rejecting p-value, then shrink), AND-rule symmetrization, neighbor
// detection within blankets, and constraint-style orientation.
LearnedStructure iamb(const Dataset& data, const LearnerConfig& config);

// Max-min parents-and-children candidate sets followed by hill climbing
// restricted to candidate pairs.
LearnedStructure mmhc(const Dataset& data, const LearnerConfig& config);

LearnedStructure learn_structure(const Dataset& data, const LearnerConfig& config);

// Intermediate stages, exposed because their contracts are testable on their
// own (blanket membership, candidate-set symmetry).
std::vector<std::vector<int>> iamb_markov_blankets(const Dataset& data,
                                                   const LearnerConfig& config,
                                                   std::int64_t* ci_tests = nullptr);
std::vector<std::vector<int>> mmpc_candidate_sets(const Dataset& data,
                                                  const LearnerConfig& config,
                                                  std::int64_t* ci_tests = nullptr);

}  // namespace netavg
