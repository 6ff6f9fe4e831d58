#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "iconforge/dsl.hpp"
#include "iconforge/relations.hpp"
#include "iconforge/solver.hpp"

namespace iconforge {

struct NodeState {
  MotionState state = MotionState::N;
  bool pinned = false;
  friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct StateAssignment {
  std::map<int, NodeState> motion;  // every scene segment
  std::vector<EdgeState> relation;  // aligned with RelationGraph::edges

  MotionStates motion_states() const;
  int strength() const;  // ST=2, WK=1, N=0 summed over edges
  std::string key() const;
  friend bool operator==(const StateAssignment&, const StateAssignment&) = default;
};

struct SearchConfig {
  double eps_stop = 1.0;
  double tie = 1e-4;
  /// Scores at or below this count as satisfied (compared as 0), which
  /// keeps optimizer noise out of the state comparisons.
  double eps_sat = 0.1;
  /// Full power set of the front when it has at most this many edges,
  /// singletons and pairs otherwise.
  int max_powerset_front = 8;
  int budget = 400;
  bool relation_search = true;
  bool motion_search = true;  // false: every unpinned node is forced to TRS
  bool warm_start = false;
  SolveConfig solve;
};

struct TraceEntry {
  std::string pass;
  std::string candidate;
  double score = 0.0;
  bool accepted = false;
};

struct SearchResult {
  StateAssignment states;
  SolveResult solve;
  double initial_score = 0.0;
  int solves = 0;
  bool budget_exhausted = false;
  std::vector<TraceEntry> trace;
};

/// Motion specifiers pin their targets; adjust starts at TRS unpinned; every
/// other node starts at N; every edge starts at ST.
StateAssignment init_states(const dsl::ConstraintProgram& program, const RelationGraph& graph, const Scene& scene);

/// Edges with an endpoint referenced by a constraint or motion specifier.
std::vector<int> front_edges(const dsl::ConstraintProgram& program, const RelationGraph& graph);

/// Primary constraints plus the secondary constraints of every edge.
std::vector<dsl::Node> active_constraints(const dsl::ConstraintProgram& program, const RelationGraph& graph,
                                          const StateAssignment& states);

/// Memoized Solve over state assignments with a call budget.
class StateSolver {
 public:
  StateSolver(const Scene& scene, const dsl::ConstraintProgram& program, const RelationGraph& graph,
              const SearchConfig& cfg);

  /// nullptr when the budget is exhausted.
  const SolveResult* evaluate(const StateAssignment& states);
  /// Score with satisfied values treated as 0.
  double effective(double score) const {
    return score <= std::max(cfg_.eps_sat, cfg_.solve.eps_conv) ? 0.0 : score;
  }
  int solves() const { return solves_; }
  bool exhausted() const { return exhausted_; }

 private:
  const Scene& scene_;
  const dsl::ConstraintProgram& program_;
  const RelationGraph& graph_;
  SearchConfig cfg_;
  std::map<std::string, SolveResult> memo_;
  int solves_ = 0;
  bool exhausted_ = false;
  const MotionMap* warm_ = nullptr;
  MotionMap last_;
};

StateAssignment relation_pass(const StateAssignment& states, const RelationGraph& graph,
                              const dsl::ConstraintProgram& program, StateSolver& solver, const SearchConfig& cfg,
                              std::vector<TraceEntry>& trace);
/// `visited` receives every node the motion front reached.
StateAssignment motion_pass(const StateAssignment& states, const RelationGraph& graph,
                            const dsl::ConstraintProgram& program, StateSolver& solver, const SearchConfig& cfg,
                            std::vector<TraceEntry>& trace, std::set<int>* visited = nullptr);

SearchResult flip_and_solve(const Scene& scene, const dsl::ConstraintProgram& program, const RelationGraph& graph,
                            const SearchConfig& cfg = {});

std::string describe(const StateAssignment& states, const RelationGraph& graph);

}  // namespace iconforge
