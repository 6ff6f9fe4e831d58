#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iconforge/dsl.hpp"
#include "iconforge/scene.hpp"

namespace iconforge {

enum class RelationKind { Inside, Contain, Overlap };
enum class RelationCategory { Inter, IntraCrucial, IntraNoncrucial };
/// Strong (weak spec plus anchor coincidence), weak, not present.
enum class EdgeState { ST, WK, N };

std::string_view kind_name(RelationKind k);
std::string_view category_name(RelationCategory c);
std::string_view state_name(EdgeState s);
int strength(EdgeState s);  // ST=2, WK=1, N=0

struct RelationConfig {
  double inside_ratio = 0.98;
  int overlap_min_px = 4;
  double overlap_min_fraction = 0.001;
  int proxy_rays = 16;
  double proxy_ratio = 0.9;
};

struct Detection {
  RelationKind kind = RelationKind::Overlap;  // kind of (i, j): Inside means i lies in j
  Vec2 anchor;
};

struct RelationEdge {
  int a = 0;
  int b = 0;  // a < b
  RelationKind kind = RelationKind::Overlap;
  RelationCategory category = RelationCategory::Inter;
  Vec2 anchor;
  EdgeState state = EdgeState::ST;

  bool crucial() const { return category == RelationCategory::IntraCrucial; }
  bool inter() const { return category == RelationCategory::Inter; }
  int other(int node) const { return node == a ? b : a; }
};

struct RelationGraph {
  std::vector<int> nodes;
  std::vector<RelationEdge> edges;
  std::vector<std::vector<int>> incident;  // node id -> edge indices

  std::vector<int> neighbor_edges(int edge) const;
  std::optional<int> find_edge(int a, int b) const;
};

/// Rasterized rest-configuration relation test for one pair.
std::optional<Detection> detect_pair(const Segment& si, const Segment& sj, int width, int height,
                                     const RelationConfig& cfg = {});

/// Default crucial/non-crucial rule: an intra edge is crucial when it is an
/// Inside/Contain relation, or a bridge of its object's contact graph. Edges
/// between two segments with the same part name are non-crucial and do not
/// take part in the bridge test.
void classify_edges(RelationGraph& graph, const Scene& scene);
/// Replaces the crucial flag of intra edges listed in `crucial` (keyed by
/// (a, b) with a < b); inter edges are left alone.
void override_crucial(RelationGraph& graph, const std::map<std::pair<int, int>, bool>& crucial);

RelationGraph build_graph(const Scene& scene, const RelationConfig& cfg = {});

/// Secondary constraints of one edge at the given state.
std::vector<dsl::Node> edge_constraints(const RelationEdge& e, EdgeState state);

std::string dump_relations(const RelationGraph& graph, const Scene& scene);

}  // namespace iconforge
