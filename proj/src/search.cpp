#include "iconforge/search.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <limits>
#include <sstream>

#include "iconforge/errors.hpp"

namespace iconforge {

MotionStates StateAssignment::motion_states() const {
  MotionStates out;
  for (const auto& [id, ns] : motion) out[id] = ns.state;
  return out;
}

int StateAssignment::strength() const {
  int s = 0;
  for (EdgeState e : relation) s += iconforge::strength(e);
  return s;
}

std::string StateAssignment::key() const {
  std::string k;
  for (const auto& [id, ns] : motion) {
    k += std::to_string(id) + "=" + std::string(motion_state_name(ns.state)) + ";";
  }
  k += "|";
  for (EdgeState e : relation) k += state_name(e);
  return k;
}

std::string describe(const StateAssignment& states, const RelationGraph& graph) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [id, ns] : states.motion) {
    if (ns.state == MotionState::N && !ns.pinned) continue;
    os << (first ? "" : " ") << "seg" << id << "=" << motion_state_name(ns.state) << (ns.pinned ? "*" : "");
    first = false;
  }
  os << " |";
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    os << " " << graph.edges[k].a << "-" << graph.edges[k].b << ":" << state_name(states.relation[k]);
  }
  return os.str();
}

namespace {

std::set<int> referenced_nodes(const dsl::ConstraintProgram& program) {
  std::set<int> out;
  for (const dsl::Node& c : program.constraints) {
    for (int id : dsl::referenced_segments(c)) out.insert(id);
  }
  for (const dsl::MotionSpec& m : program.motions) out.insert(m.target);
  return out;
}

}  // namespace

StateAssignment init_states(const dsl::ConstraintProgram& program, const RelationGraph& graph, const Scene& scene) {
  StateAssignment s;
  for (const Segment& seg : scene.segments) s.motion[seg.id] = {};
  s.relation.assign(graph.edges.size(), EdgeState::ST);

  struct Dofs {
    bool move = false, rotate = false, scale = false, stay = false, adjust = false;
  };
  std::map<int, Dofs> dofs;
  for (const dsl::MotionSpec& m : program.motions) {
    if (!scene.has_segment(m.target)) {
      throw ValidationError("motion specifier for unknown segment seg" + std::to_string(m.target));
    }
    Dofs& d = dofs[m.target];
    switch (m.kind) {
      case dsl::MotionKind::Translate: d.move = true; break;
      case dsl::MotionKind::Rotate: d.rotate = true; break;
      case dsl::MotionKind::Scale: d.scale = true; break;
      case dsl::MotionKind::Stay: d.stay = true; break;
      case dsl::MotionKind::Adjust: d.adjust = true; break;
    }
  }
  for (const auto& [id, d] : dofs) {
    const bool explicit_motion = d.move || d.rotate || d.scale;
    if (d.stay && (explicit_motion || d.adjust)) {
      throw ValidationError("seg" + std::to_string(id) + " has both stay and a movement specifier");
    }
    NodeState& ns = s.motion[id];
    if (d.stay) {
      ns = {MotionState::N, true};
    } else if (explicit_motion) {
      ns.pinned = true;
      if (d.rotate && d.scale) {
        ns.state = MotionState::TRS;
      } else if (d.rotate) {
        ns.state = MotionState::TR;
      } else if (d.scale) {
        ns.state = MotionState::TS;
      } else {
        ns.state = MotionState::T;
      }
    } else {
      ns = {MotionState::TRS, false};
    }
  }
  return s;
}

std::vector<int> front_edges(const dsl::ConstraintProgram& program, const RelationGraph& graph) {
  const std::set<int> nodes = referenced_nodes(program);
  std::vector<int> out;
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    if (nodes.contains(graph.edges[k].a) || nodes.contains(graph.edges[k].b)) out.push_back(static_cast<int>(k));
  }
  return out;
}

std::vector<dsl::Node> active_constraints(const dsl::ConstraintProgram& program, const RelationGraph& graph,
                                          const StateAssignment& states) {
  std::vector<dsl::Node> out = program.constraints;
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    for (dsl::Node& n : edge_constraints(graph.edges[k], states.relation[k])) out.push_back(std::move(n));
  }
  return out;
}

StateSolver::StateSolver(const Scene& scene, const dsl::ConstraintProgram& program, const RelationGraph& graph,
                         const SearchConfig& cfg)
    : scene_(scene), program_(program), graph_(graph), cfg_(cfg) {}

const SolveResult* StateSolver::evaluate(const StateAssignment& states) {
  const std::string key = states.key();
  if (const auto it = memo_.find(key); it != memo_.end()) return &it->second;
  if (solves_ >= cfg_.budget) {
    exhausted_ = true;
    return nullptr;
  }
  ++solves_;
  const MotionMap* init = cfg_.warm_start && !last_.empty() ? &last_ : nullptr;
  SolveResult r = solve(scene_, active_constraints(program_, graph_, states), states.motion_states(), cfg_.solve, init);
  if (cfg_.warm_start) last_ = r.motions;
  return &memo_.emplace(key, std::move(r)).first->second;
}

namespace {

// Subsets of `front` ordered by size, then lexicographically.
std::vector<std::vector<int>> front_subsets(const std::vector<int>& front, int max_powerset) {
  const int n = static_cast<int>(front.size());
  const int max_size = n <= max_powerset ? n : std::min(n, 2);
  std::vector<std::vector<int>> out;
  for (int size = 1; size <= max_size; ++size) {
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      std::vector<int> subset;
      for (int i : idx) subset.push_back(front[static_cast<std::size_t>(i)]);
      out.push_back(std::move(subset));
      int i = size - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - size + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

struct Scored {
  StateAssignment states;
  double score = 0.0;
};

// Minimum score, then the most relation strength and the fewest degrees of
// freedom within the tie band; earlier entries win exact ties.
std::size_t pick(const std::vector<Scored>& c, double tie, bool prefer_last) {
  double lo = std::numeric_limits<double>::infinity();
  for (const Scored& s : c) lo = std::min(lo, s.score);
  std::size_t best = c.size();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].score > lo + tie) continue;
    if (best == c.size() || prefer_last || c[i].states.strength() > c[best].states.strength()) best = i;
  }
  return best;
}

}  // namespace

StateAssignment relation_pass(const StateAssignment& states, const RelationGraph& graph,
                              const dsl::ConstraintProgram& program, StateSolver& solver, const SearchConfig& cfg,
                              std::vector<TraceEntry>& trace) {
  StateAssignment current = states;
  const SolveResult* start = solver.evaluate(current);
  if (!start) return current;
  double current_score = solver.effective(start->score);
  std::set<int> visited;
  std::vector<int> front = front_edges(program, graph);
  while (!front.empty() && current_score >= cfg.eps_stop) {
    for (int e : front) visited.insert(e);
    std::vector<Scored> level{{current, current_score}};
    std::vector<std::size_t> trace_index{0};
    for (const std::vector<int>& subset : front_subsets(front, cfg.max_powerset_front)) {
      StateAssignment c = current;
      const auto flip = [&](auto pred, EdgeState from, EdgeState to) {
        bool changed = false;
        for (int e : subset) {
          const RelationEdge& edge = graph.edges[static_cast<std::size_t>(e)];
          if (pred(edge) && c.relation[static_cast<std::size_t>(e)] == from) {
            c.relation[static_cast<std::size_t>(e)] = to;
            changed = true;
          }
        }
        return changed;
      };
      const auto is_inter = [](const RelationEdge& e) { return e.inter(); };
      const auto is_noncrucial = [](const RelationEdge& e) { return e.category == RelationCategory::IntraNoncrucial; };
      const auto is_crucial = [](const RelationEdge& e) { return e.crucial(); };
      StateAssignment chain = current;
      for (int step = 0; step < 4; ++step) {
        c = chain;
        bool ch = false;
        switch (step) {
          case 0: ch = flip(is_inter, EdgeState::ST, EdgeState::WK); break;
          case 1: ch = flip(is_inter, EdgeState::WK, EdgeState::N); break;
          case 2: ch = flip(is_noncrucial, EdgeState::ST, EdgeState::N); break;
          default: ch = flip(is_crucial, EdgeState::ST, EdgeState::WK); break;
        }
        chain = c;
        if (!ch) continue;
        const SolveResult* r = solver.evaluate(c);
        if (!r) break;
        level.push_back({c, solver.effective(r->score)});
        trace_index.push_back(trace.size());
        trace.push_back({"relation", describe(c, graph), r->score, false});
      }
      if (solver.exhausted()) break;
    }
    const std::size_t chosen = pick(level, cfg.tie, false);
    if (chosen != 0) {
      current = level[chosen].states;
      current_score = level[chosen].score;
      trace[trace_index[chosen]].accepted = true;
    }
    if (solver.exhausted()) break;
    std::set<int> next;
    for (int e : front) {
      for (int n : graph.neighbor_edges(e)) {
        if (!visited.contains(n)) next.insert(n);
      }
    }
    front.assign(next.begin(), next.end());
  }
  return current;
}

StateAssignment motion_pass(const StateAssignment& states, const RelationGraph& graph,
                            const dsl::ConstraintProgram& program, StateSolver& solver, const SearchConfig& cfg,
                            std::vector<TraceEntry>& trace, std::set<int>* visited_out) {
  StateAssignment current = states;
  std::set<int> visited;
  const std::set<int> start = referenced_nodes(program);
  std::vector<int> front(start.begin(), start.end());
  while (!front.empty() && !solver.exhausted()) {
    for (int node : front) {
      visited.insert(node);
      if (current.motion.at(node).pinned) continue;
      std::vector<Scored> cands;
      for (MotionState m : {MotionState::TRS, MotionState::TR, MotionState::TS, MotionState::T, MotionState::N}) {
        StateAssignment c = current;
        c.motion[node].state = m;
        const SolveResult* r = solver.evaluate(c);
        if (!r) break;
        cands.push_back({c, solver.effective(r->score)});
        trace.push_back({"motion", describe(c, graph), r->score, false});
      }
      if (cands.empty()) break;
      const std::size_t chosen = pick(cands, cfg.tie, true);
      current = cands[chosen].states;
      trace[trace.size() - cands.size() + chosen].accepted = true;
    }
    std::set<int> next;
    for (int node : front) {
      if (!graph.incident.empty()) {
        for (int e : graph.incident[static_cast<std::size_t>(node)]) {
          const int m = graph.edges[static_cast<std::size_t>(e)].other(node);
          if (!visited.contains(m)) next.insert(m);
        }
      }
    }
    front.assign(next.begin(), next.end());
  }
  if (visited_out) *visited_out = visited;
  return current;
}

namespace {

// Re-strengthens weakened edges one step at a time while the score stays
// within the tie band.
StateAssignment strength_polish(const StateAssignment& states, const RelationGraph& graph, StateSolver& solver,
                                const SearchConfig& cfg, std::vector<TraceEntry>& trace) {
  StateAssignment current = states;
  const SolveResult* r0 = solver.evaluate(current);
  if (!r0) return current;
  double score = solver.effective(r0->score);
  bool changed = true;
  while (changed && !solver.exhausted()) {
    changed = false;
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
      const RelationEdge& e = graph.edges[k];
      const EdgeState s = current.relation[k];
      EdgeState up = s;
      if (s == EdgeState::WK) up = EdgeState::ST;
      if (s == EdgeState::N) up = e.inter() ? EdgeState::WK : EdgeState::ST;
      if (up == s) continue;
      StateAssignment c = current;
      c.relation[k] = up;
      const SolveResult* r = solver.evaluate(c);
      if (!r) break;
      const double sc = solver.effective(r->score);
      const bool ok = sc <= score + cfg.tie;
      trace.push_back({"polish", describe(c, graph), r->score, ok});
      if (ok) {
        current = c;
        score = std::min(score, sc);
        changed = true;
      }
    }
  }
  return current;
}

}  // namespace

SearchResult flip_and_solve(const Scene& scene, const dsl::ConstraintProgram& program, const RelationGraph& graph,
                            const SearchConfig& cfg) {
  SearchResult out;
  StateAssignment states = init_states(program, graph, scene);
  StateSolver solver(scene, program, graph, cfg);
  const SolveResult* initial = solver.evaluate(states);
  out.initial_score = initial->score;
  const StateAssignment start = states;
  // Relation states are decided with every unpinned node free; the motion
  // pass then takes away the freedom that is not needed.
  for (auto& [id, ns] : states.motion) {
    if (!ns.pinned) ns.state = MotionState::TRS;
  }
  if (cfg.relation_search) states = relation_pass(states, graph, program, solver, cfg, out.trace);
  if (cfg.motion_search) {
    std::set<int> visited;
    states = motion_pass(states, graph, program, solver, cfg, out.trace, &visited);
    // Nodes the motion front never reaches share no constraint with the
    // edited ones.
    for (auto& [id, ns] : states.motion) {
      if (!ns.pinned && !visited.contains(id)) ns.state = MotionState::N;
    }
  }
  if (cfg.relation_search) states = strength_polish(states, graph, solver, cfg, out.trace);

  const SolveResult* final_result = solver.evaluate(states);
  if (!final_result || final_result->score > out.initial_score + cfg.tie) {
    states = start;
    final_result = solver.evaluate(start);
  }
  out.states = states;
  out.solve = *final_result;
  out.solves = solver.solves();
  out.budget_exhausted = solver.exhausted();
  if (out.budget_exhausted) spdlog::warn("solve budget of {} calls exhausted; returning the best state found", cfg.budget);
  return out;
}

}  // namespace iconforge
