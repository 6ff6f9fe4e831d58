#include <doctest.h>

#include "evalkit.hpp"
#include "iconforge/errors.hpp"
#include "iconforge/search.hpp"
#include "shapes.hpp"

using namespace iconforge;
using namespace iconforge::testing;

namespace {

Scene fixture(const char* name) { return load_scene(std::string(ICONFORGE_FIXTURES) + "/" + name); }

int edge_index(const RelationGraph& g, int a, int b) {
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return static_cast<int>(k);
  }
  return -1;
}

bool unmoved(const MotionMap& m, int id) { return !m.contains(id) || m.at(id).is_identity(); }

void check_common_invariants(const SearchResult& r, const StateAssignment& init, const RelationGraph& g,
                             const SearchConfig& cfg) {
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    if (g.edges[k].crucial()) CHECK(r.states.relation[k] != EdgeState::N);
  }
  for (const auto& [id, ns] : init.motion) {
    if (ns.pinned) CHECK(r.states.motion.at(id) == ns);
  }
  CHECK(r.solve.score <= r.initial_score + cfg.tie);
  CHECK(r.solves <= cfg.budget);
}

}  // namespace

TEST_CASE("init_states from motion specifiers") {
  const Scene s = make_scene({{"a", "a", rect(0, 0, 10, 10)},
                              {"b", "b", rect(8, 0, 18, 10)},
                              {"c", "c", rect(100, 100, 110, 110)},
                              {"d", "d", rect(200, 200, 210, 210)},
                              {"e", "e", rect(300, 300, 310, 310)}});
  const RelationGraph g = build_graph(s);
  REQUIRE(g.edges.size() == 1);

  const auto st = init_states(dsl::parse("move(seg4)\nscale(seg3)\nstay(seg2)\nrotate(seg3)", s), g, s);
  CHECK(st.motion.at(4) == NodeState{MotionState::T, true});
  CHECK(st.motion.at(3) == NodeState{MotionState::TRS, true});
  CHECK(st.motion.at(2) == NodeState{MotionState::N, true});
  CHECK(st.motion.at(0) == NodeState{MotionState::N, false});
  CHECK(st.relation == std::vector<EdgeState>{EdgeState::ST});

  const auto scale_only = init_states(dsl::parse("scale(seg1)", s), g, s);
  CHECK(scale_only.motion.at(1) == NodeState{MotionState::TS, true});

  const auto adjust = init_states(dsl::parse("adjust(seg2)", s), g, s);
  CHECK(adjust.motion.at(2) == NodeState{MotionState::TRS, false});

  const auto none = init_states(dsl::parse("equal(center_x(seg0), 5)", s), g, s);
  for (const auto& [id, ns] : none.motion) CHECK(ns == NodeState{MotionState::N, false});

  CHECK_THROWS_AS(init_states(dsl::parse("stay(seg1)\nmove(seg1)", s), g, s), ValidationError);
}

TEST_CASE("front edges") {
  const Scene lamp = fixture("lamp.json");
  const RelationGraph g = build_graph(lamp);
  const auto front = front_edges(dsl::parse("move(seg0)\ntouch(seg0, seg4)", lamp), g);
  std::set<std::pair<int, int>> pairs;
  for (int k : front) pairs.insert({g.edges[static_cast<std::size_t>(k)].a, g.edges[static_cast<std::size_t>(k)].b});
  CHECK(pairs == std::set<std::pair<int, int>>{{0, 1}, {3, 4}});

  const Scene tri = make_scene({{"a", "a", rect(0, 0, 20, 20)},
                                {"b", "b", rect(15, 0, 35, 20)},
                                {"c", "c", rect(5, 15, 30, 35)},
                                {"d", "d", rect(300, 300, 310, 310)}});
  const RelationGraph gt = build_graph(tri);
  REQUIRE(gt.edges.size() == 3);
  CHECK(front_edges(dsl::parse("equal(center_x(old(seg1)), 3)", tri), gt).size() == 2);
  CHECK(front_edges(dsl::parse("move(seg3)", tri), gt).empty());
}

TEST_CASE("identity request keeps everything") {
  const Scene lamp = fixture("lamp.json");
  const RelationGraph g = build_graph(lamp);
  const auto prog = dsl::parse("equal(center_x(seg0), center_x(old(seg0)))", lamp);
  const SearchConfig cfg;
  const auto r = flip_and_solve(lamp, prog, g, cfg);
  CHECK(r.solve.score < 1e-9);
  CHECK(r.states == init_states(prog, g, lamp));
  for (const auto& t : r.trace) {
    if (t.pass == "relation") CHECK_FALSE(t.accepted);
  }
  for (EdgeState e : r.states.relation) CHECK(e == EdgeState::ST);
  for (const auto& [id, m] : r.solve.motions) CHECK(m.is_identity());
}

TEST_CASE("lamp: move the shade to touch the base") {
  const Scene lamp = fixture("lamp.json");
  const RelationGraph g = build_graph(lamp);
  const auto prog = dsl::parse("move(seg0)\ntouch(seg0, seg4)", lamp);
  const SearchConfig cfg;
  const auto r = flip_and_solve(lamp, prog, g, cfg);
  check_common_invariants(r, init_states(prog, g, lamp), g, cfg);
  CHECK(r.solve.score < cfg.eps_stop);
  CHECK(r.states.motion.at(4).state == MotionState::N);
  CHECK(unmoved(r.solve.motions, 4));
  CHECK(r.solve.motions.at(0).ty > 50);
  CHECK(r.states.motion.at(1).state != MotionState::N);

  // Analytic contact: the shade's lowest edge meets the base top.
  Evaluator ev(lamp, {});
  ev.set_motions(r.solve.motions);
  const double gap =
      ev.signed_gap(ev.eval_segment(dsl::make_segref(0)), ev.eval_segment(dsl::make_segref(4))).value;
  CHECK(std::abs(gap) < 1.0);
}

TEST_CASE("basket: rotating the handles apart breaks only the handle-handle edge") {
  const Scene basket = fixture("basket.json");
  const RelationGraph g = build_graph(basket);
  const auto prog = dsl::parse("rotate(seg0)\nrotate(seg1)\nlarger(min_dist(seg0, seg1), 30)", basket);
  const SearchConfig cfg;
  const auto r = flip_and_solve(basket, prog, g, cfg);
  check_common_invariants(r, init_states(prog, g, basket), g, cfg);
  CHECK(r.states.relation[static_cast<std::size_t>(edge_index(g, 0, 1))] == EdgeState::N);
  CHECK(r.states.relation[static_cast<std::size_t>(edge_index(g, 0, 3))] == EdgeState::ST);
  CHECK(r.states.relation[static_cast<std::size_t>(edge_index(g, 1, 3))] == EdgeState::ST);
  CHECK(r.solve.score < cfg.eps_stop);
}

TEST_CASE("isolated segment never enters the front") {
  const Scene s = make_scene({{"a", "a", rect(0, 0, 20, 20)},
                              {"b", "b", rect(18, 0, 38, 20)},
                              {"c", "c", disk(300, 300, 20)}});
  const RelationGraph g = build_graph(s);
  const auto prog = dsl::parse("move(seg0)\nequal(center_y(seg0), center_y(old(seg0)) + 30)", s);
  const auto r = flip_and_solve(s, prog, g);
  CHECK(r.states.motion.at(2).state == MotionState::N);
  CHECK(unmoved(r.solve.motions, 2));
  CHECK(r.solve.score < 1.0);
}

TEST_CASE("scaling is kept only where it is needed") {
  const Scene s = make_scene({{"a", "a", rect(100, 100, 140, 140)}, {"b", "b", rect(100, 138, 140, 178)}});
  const RelationGraph g = build_graph(s);
  REQUIRE(g.edges.size() == 1);
  const auto prog = dsl::parse("stay(seg0)\nequal(vert_len(seg1), 2 * vert_len(old(seg1)))", s);
  const auto r = flip_and_solve(s, prog, g);
  CHECK(r.states.motion.at(1).state == MotionState::TS);
  CHECK(r.states.relation[0] == EdgeState::ST);
  CHECK(r.solve.score < 1.0);
}

TEST_CASE("over-constrained request is flagged") {
  const Scene s = make_scene({{"a", "a", rect(0, 0, 10, 10)}, {"b", "b", rect(50, 0, 60, 10)}});
  const RelationGraph g = build_graph(s);
  const auto prog = dsl::parse("stay(seg0)\nstay(seg1)\ntouch(seg0, seg1)", s);
  const auto r = flip_and_solve(s, prog, g);
  CHECK(r.solve.unsatisfiable);
  CHECK(r.solve.score == doctest::Approx(40));
  CHECK(r.states.motion.at(0) == NodeState{MotionState::N, true});
  CHECK(r.states.motion.at(1) == NodeState{MotionState::N, true});
}

TEST_CASE("search is deterministic and respects the budget") {
  const Scene lamp = fixture("lamp.json");
  const RelationGraph g = build_graph(lamp);
  const auto prog = dsl::parse("move(seg0)\ntouch(seg0, seg4)", lamp);
  SearchConfig cfg;
  cfg.budget = 5;
  const auto a = flip_and_solve(lamp, prog, g, cfg);
  const auto b = flip_and_solve(lamp, prog, g, cfg);
  CHECK(a.solves <= 5);
  CHECK(a.budget_exhausted);
  CHECK(a.states == b.states);
  CHECK(a.solve.score == b.solve.score);
  CHECK(a.solve.score <= a.initial_score + cfg.tie);
}
