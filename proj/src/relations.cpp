#include "iconforge/relations.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace iconforge {

std::string_view kind_name(RelationKind k) {
  switch (k) {
    case RelationKind::Inside: return "inside";
    case RelationKind::Contain: return "contain";
    default: return "overlap";
  }
}

std::string_view category_name(RelationCategory c) {
  switch (c) {
    case RelationCategory::Inter: return "inter";
    case RelationCategory::IntraCrucial: return "intra_crucial";
    default: return "intra_noncrucial";
  }
}

std::string_view state_name(EdgeState s) {
  switch (s) {
    case EdgeState::ST: return "ST";
    case EdgeState::WK: return "WK";
    default: return "N";
  }
}

int strength(EdgeState s) {
  switch (s) {
    case EdgeState::ST: return 2;
    case EdgeState::WK: return 1;
    default: return 0;
  }
}

std::vector<int> RelationGraph::neighbor_edges(int edge) const {
  const RelationEdge& e = edges.at(static_cast<std::size_t>(edge));
  std::set<int> out;
  for (int node : {e.a, e.b}) {
    for (int k : incident.at(static_cast<std::size_t>(node))) {
      if (k != edge) out.insert(k);
    }
  }
  return {out.begin(), out.end()};
}

std::optional<int> RelationGraph::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].a == a && edges[k].b == b) return static_cast<int>(k);
  }
  return std::nullopt;
}

namespace {

struct PixelBox {
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive
  bool empty() const { return x1 < x0 || y1 < y0; }
};

PixelBox pixel_box(const Mask& m) {
  PixelBox b{m.width, m.height, -1, -1};
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (m.at(x, y)) {
        b.x0 = std::min(b.x0, x);
        b.y0 = std::min(b.y0, y);
        b.x1 = std::max(b.x1, x);
        b.y1 = std::max(b.y1, y);
      }
    }
  }
  return b;
}

struct Rasterized {
  Mask mask;
  PixelBox box;
  std::size_t area = 0;
};

Rasterized rasterize_rest(const Segment& s, int w, int h) {
  Rasterized r;
  r.mask = rasterize_segment(s, w, h);
  r.box = pixel_box(r.mask);
  r.area = count_set(r.mask);
  return r;
}

// Fraction of a's pixels lying in b's hole-filled raster. Returns early with
// a value below `ratio` as soon as the answer is decided.
double inside_fraction(const Rasterized& a, const Rasterized& b, const RelationConfig& cfg) {
  if (a.area == 0) return 0.0;
  const auto allowed = static_cast<std::size_t>(std::floor((1.0 - cfg.inside_ratio) * static_cast<double>(a.area)));
  std::size_t outside = 0;
  // Pixels outside b's bounding box can never be in its proxy.
  for (int y = a.box.y0; y <= a.box.y1; ++y) {
    for (int x = a.box.x0; x <= a.box.x1; ++x) {
      if (a.mask.at(x, y) && (x < b.box.x0 || x > b.box.x1 || y < b.box.y0 || y > b.box.y1)) ++outside;
    }
  }
  if (outside > allowed) return 1.0 - static_cast<double>(outside) / static_cast<double>(a.area);
  for (int y = a.box.y0; y <= a.box.y1; ++y) {
    for (int x = a.box.x0; x <= a.box.x1; ++x) {
      if (!a.mask.at(x, y) || x < b.box.x0 || x > b.box.x1 || y < b.box.y0 || y > b.box.y1) continue;
      if (b.mask.at(x, y)) continue;
      if (!ray_majority(b.mask, x, y, cfg.proxy_rays, cfg.proxy_ratio)) {
        if (++outside > allowed) return 1.0 - static_cast<double>(outside) / static_cast<double>(a.area);
      }
    }
  }
  return 1.0 - static_cast<double>(outside) / static_cast<double>(a.area);
}

// Centroid of the pixel set; if the centroid pixel is not in the set, the
// nearest member pixel centre.
Vec2 anchor_of(const std::vector<std::pair<int, int>>& pixels, const std::function<bool(int, int)>& member) {
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pixels) {
    sx += x + 0.5;
    sy += y + 0.5;
  }
  const Vec2 c{sx / static_cast<double>(pixels.size()), sy / static_cast<double>(pixels.size())};
  if (member(static_cast<int>(std::floor(c.x)), static_cast<int>(std::floor(c.y)))) return c;
  double best = std::numeric_limits<double>::infinity();
  Vec2 out = c;
  for (const auto& [x, y] : pixels) {
    const Vec2 p{x + 0.5, y + 0.5};
    const double d = norm2(p - c);
    if (d < best) {
      best = d;
      out = p;
    }
  }
  return out;
}

std::optional<Detection> detect_rasters(const Rasterized& ri, const Rasterized& rj, const RelationConfig& cfg) {
  if (ri.box.empty() || rj.box.empty()) return std::nullopt;
  if (ri.box.x1 < rj.box.x0 || rj.box.x1 < ri.box.x0 || ri.box.y1 < rj.box.y0 || rj.box.y1 < ri.box.y0) {
    return std::nullopt;
  }
  const bool i_in_j = inside_fraction(ri, rj, cfg) >= cfg.inside_ratio;
  const bool j_in_i = inside_fraction(rj, ri, cfg) >= cfg.inside_ratio;
  const auto both = [&](int x, int y) { return ri.mask.get(x, y) && rj.mask.get(x, y); };
  if (i_in_j != j_in_i) {
    const Rasterized& inner = i_in_j ? ri : rj;
    std::vector<std::pair<int, int>> pixels;
    for (int y = inner.box.y0; y <= inner.box.y1; ++y) {
      for (int x = inner.box.x0; x <= inner.box.x1; ++x) {
        if (inner.mask.at(x, y)) pixels.emplace_back(x, y);
      }
    }
    // The contained segment may sit in a hole of the container; then its own
    // raster is the only one that holds the anchor.
    std::vector<std::pair<int, int>> shared;
    for (const auto& [x, y] : pixels) {
      if (both(x, y)) shared.emplace_back(x, y);
    }
    Detection d;
    d.kind = i_in_j ? RelationKind::Inside : RelationKind::Contain;
    if (shared.empty()) {
      d.anchor = anchor_of(pixels, [&](int x, int y) { return inner.mask.get(x, y) != 0; });
    } else {
      d.anchor = anchor_of(pixels, both);
      if (!both(static_cast<int>(std::floor(d.anchor.x)), static_cast<int>(std::floor(d.anchor.y)))) {
        d.anchor = anchor_of(shared, both);
      }
    }
    return d;
  }
  std::vector<std::pair<int, int>> inter;
  const int x0 = std::max(ri.box.x0, rj.box.x0), x1 = std::min(ri.box.x1, rj.box.x1);
  const int y0 = std::max(ri.box.y0, rj.box.y0), y1 = std::min(ri.box.y1, rj.box.y1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (both(x, y)) inter.emplace_back(x, y);
    }
  }
  const double smaller = static_cast<double>(std::min(ri.area, rj.area));
  const double needed = std::max(static_cast<double>(cfg.overlap_min_px), cfg.overlap_min_fraction * smaller);
  if (static_cast<double>(inter.size()) < needed || inter.empty()) return std::nullopt;
  Detection d;
  d.kind = RelationKind::Overlap;
  d.anchor = anchor_of(inter, both);
  return d;
}

}  // namespace

std::optional<Detection> detect_pair(const Segment& si, const Segment& sj, int width, int height,
                                     const RelationConfig& cfg) {
  return detect_rasters(rasterize_rest(si, width, height), rasterize_rest(sj, width, height), cfg);
}

void classify_edges(RelationGraph& graph, const Scene& scene) {
  const auto object_key = [&](int id) {
    const Label& l = scene.segment(id).label;
    return std::pair{l.object, l.instance};
  };
  for (RelationEdge& e : graph.edges) {
    e.category = object_key(e.a) == object_key(e.b) ? RelationCategory::IntraNoncrucial : RelationCategory::Inter;
  }
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    RelationEdge& e = graph.edges[k];
    if (e.inter()) continue;
    if (e.kind != RelationKind::Overlap) {
      e.category = RelationCategory::IntraCrucial;
      continue;
    }
    // Edges between repeated parts (two handles) are never structural. The
    // bridge test runs on the object's contact graph without them.
    const auto same_part = [&](const RelationEdge& f) {
      return scene.segment(f.a).label.part == scene.segment(f.b).label.part;
    };
    if (same_part(e)) continue;
    std::set<int> seen{e.a};
    std::vector<int> stack{e.a};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (int j : graph.incident[static_cast<std::size_t>(n)]) {
        const RelationEdge& f = graph.edges[static_cast<std::size_t>(j)];
        if (static_cast<std::size_t>(j) == k || f.inter() || same_part(f)) continue;
        const int m = f.other(n);
        if (seen.insert(m).second) stack.push_back(m);
      }
    }
    if (!seen.contains(e.b)) e.category = RelationCategory::IntraCrucial;
  }
}

void override_crucial(RelationGraph& graph, const std::map<std::pair<int, int>, bool>& crucial) {
  for (RelationEdge& e : graph.edges) {
    if (e.inter()) continue;
    if (const auto it = crucial.find({e.a, e.b}); it != crucial.end()) {
      e.category = it->second ? RelationCategory::IntraCrucial : RelationCategory::IntraNoncrucial;
    }
  }
}

RelationGraph build_graph(const Scene& scene, const RelationConfig& cfg) {
  RelationGraph g;
  std::vector<Rasterized> rasters;
  for (const Segment& s : scene.segments) {
    g.nodes.push_back(s.id);
    rasters.push_back(rasterize_rest(s, scene.width, scene.height));
  }
  g.incident.resize(scene.segments.size());
  for (std::size_t i = 0; i < rasters.size(); ++i) {
    for (std::size_t j = i + 1; j < rasters.size(); ++j) {
      const auto d = detect_rasters(rasters[i], rasters[j], cfg);
      if (!d) continue;
      RelationEdge e;
      e.a = static_cast<int>(i);
      e.b = static_cast<int>(j);
      e.kind = d->kind;
      e.anchor = d->anchor;
      g.incident[i].push_back(static_cast<int>(g.edges.size()));
      g.incident[j].push_back(static_cast<int>(g.edges.size()));
      g.edges.push_back(e);
    }
  }
  classify_edges(g, scene);
  return g;
}

std::vector<dsl::Node> edge_constraints(const RelationEdge& e, EdgeState state) {
  using dsl::make;
  using dsl::make_segref;
  using dsl::Op;
  std::vector<dsl::Node> out;
  if (state == EdgeState::N) return out;
  switch (e.kind) {
    case RelationKind::Inside: out.push_back(make(Op::Inside, {make_segref(e.a), make_segref(e.b)})); break;
    case RelationKind::Contain: out.push_back(make(Op::Inside, {make_segref(e.b), make_segref(e.a)})); break;
    default: out.push_back(make(Op::Overlap, {make_segref(e.a), make_segref(e.b)})); break;
  }
  if (state == EdgeState::ST) {
    out.push_back(make(Op::CoincideOnPoint,
                       {make_segref(e.a), dsl::make_point(e.anchor), make_segref(e.b), dsl::make_point(e.anchor)}));
  }
  return out;
}

std::string dump_relations(const RelationGraph& graph, const Scene& scene) {
  nlohmann::json doc;
  doc["segments"] = nlohmann::json::array();
  for (const Segment& s : scene.segments) {
    doc["segments"].push_back({{"id", s.id}, {"label", s.label.text()}, {"instance", s.label.instance}});
  }
  doc["edges"] = nlohmann::json::array();
  for (const RelationEdge& e : graph.edges) {
    doc["edges"].push_back({{"a", e.a},
                            {"b", e.b},
                            {"kind", kind_name(e.kind)},
                            {"category", category_name(e.category)},
                            {"anchor", {e.anchor.x, e.anchor.y}},
                            {"state", state_name(e.state)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace iconforge
