#include "iconforge/render.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "iconforge/errors.hpp"

namespace iconforge {

OrderMode parse_order_mode(std::string_view text) {
  if (text == "auto") return OrderMode::Auto;
  if (text == "input") return OrderMode::Input;
  if (text == "initial-config") return OrderMode::InitialConfig;
  throw ValidationError("unknown order mode '" + std::string(text) + "' (auto, input, initial-config)");
}

namespace {

struct Pixel {
  int x = 0;
  int y = 0;
};

std::vector<Pixel> intersection_boundary(const Mask& a, const Mask& b) {
  std::vector<Pixel> out;
  auto in = [&](int x, int y) { return a.get(x, y) && b.get(x, y); };
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (!in(x, y)) continue;
      if (!in(x - 1, y) || !in(x + 1, y) || !in(x, y - 1) || !in(x, y + 1)) out.push_back({x, y});
    }
  }
  return out;
}

// Farthest-point-first subset, seeded with the first pixel in scan order.
std::vector<Pixel> farthest_points(const std::vector<Pixel>& pts, int cap) {
  std::vector<Pixel> out;
  if (pts.empty() || cap <= 0) return out;
  std::vector<double> d(pts.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  while (static_cast<int>(out.size()) < cap && out.size() < pts.size()) {
    const Pixel p = pts[next];
    out.push_back(p);
    double best = -1;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double dx = pts[k].x - p.x;
      const double dy = pts[k].y - p.y;
      d[k] = std::min(d[k], dx * dx + dy * dy);
      if (d[k] > best) {
        best = d[k];
        next = k;
      }
    }
    if (best <= 0) break;
  }
  return out;
}

// Longest 4-connected shortest path (steps) inside `mask` between any two of
// `pts`; unreachable pairs are skipped.
int longest_inner_path(const Mask& mask, const std::vector<Pixel>& pts) {
  const int w = mask.width;
  std::vector<int> dist(mask.data.size(), -1);
  std::vector<std::size_t> touched;
  std::vector<std::size_t> queue;
  std::vector<int> target_of(mask.data.size(), -1);
  int longest = 0;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    for (std::size_t t : touched) dist[t] = -1;
    touched.clear();
    queue.clear();
    std::size_t remaining = pts.size() - s - 1;
    std::vector<std::size_t> targets;
    for (std::size_t t = s + 1; t < pts.size(); ++t) {
      targets.push_back(static_cast<std::size_t>(pts[t].y) * w + pts[t].x);
      target_of[targets.back()] = static_cast<int>(s);
    }
    const std::size_t start = static_cast<std::size_t>(pts[s].y) * w + pts[s].x;
    dist[start] = 0;
    touched.push_back(start);
    queue.push_back(start);
    for (std::size_t head = 0; head < queue.size() && remaining > 0; ++head) {
      const std::size_t cur = queue[head];
      const int x = static_cast<int>(cur % w);
      const int y = static_cast<int>(cur / w);
      const int nd = dist[cur] + 1;
      const Pixel nbrs[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (const Pixel& q : nbrs) {
        if (!mask.get(q.x, q.y)) continue;
        const std::size_t idx = static_cast<std::size_t>(q.y) * w + q.x;
        if (dist[idx] >= 0) continue;
        dist[idx] = nd;
        touched.push_back(idx);
        queue.push_back(idx);
        if (target_of[idx] == static_cast<int>(s)) --remaining;
      }
    }
    for (std::size_t t : targets) longest = std::max(longest, dist[t]);
  }
  return longest;
}

}  // namespace

PairVerdict depth_order_pair(const Mask& si, const Mask& sj, const DepthConfig& cfg) {
  if (si.width != sj.width || si.height != sj.height) {
    throw GeometryError("depth order: rasters differ in size");
  }
  PairVerdict v;
  const std::vector<Pixel> boundary = intersection_boundary(si, sj);
  if (boundary.empty()) return v;
  const std::vector<Pixel> pts = farthest_points(boundary, cfg.max_boundary_points);
  v.length_i = longest_inner_path(si, pts);
  v.length_j = longest_inner_path(sj, pts);
  const int hi = std::max(v.length_i, v.length_j);
  if (hi == 0 || std::abs(v.length_i - v.length_j) <= cfg.band * hi) return v;
  v.verdict = v.length_i > v.length_j ? Verdict::JFront : Verdict::IFront;
  return v;
}

DepthOrder depth_sort(const Scene& scene, std::vector<PairVerdict> verdicts) {
  const int n = static_cast<int>(scene.segments.size());
  DepthOrder out;
  // back -> front
  std::set<std::pair<int, int>> edges;
  for (const PairVerdict& v : verdicts) {
    if (v.verdict == Verdict::IFront) edges.insert({v.j, v.i});
    if (v.verdict == Verdict::JFront) edges.insert({v.i, v.j});
  }
  out.verdicts = std::move(verdicts);

  auto key = [&](int id) {
    return std::pair{scene.segments[static_cast<std::size_t>(id)].z_hint.value_or(0), id};
  };
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (const auto& [back, front] : edges) ++indegree[static_cast<std::size_t>(front)];
  std::set<std::pair<int, int>> ready;
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  for (int id = 0; id < n; ++id) {
    if (indegree[static_cast<std::size_t>(id)] == 0) ready.insert(key(id));
  }
  while (static_cast<int>(out.order.size()) < n) {
    if (ready.empty()) {
      // Cycle: drop the lowest-id verdict among unplaced segments.
      std::pair<int, int> victim{-1, -1};
      std::pair<int, int> best_key{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
      for (const auto& [back, front] : edges) {
        if (placed[static_cast<std::size_t>(back)] || placed[static_cast<std::size_t>(front)]) continue;
        const std::pair<int, int> k{std::min(back, front), std::max(back, front)};
        if (k < best_key) {
          best_key = k;
          victim = {back, front};
        }
      }
      edges.erase(victim);
      out.broken.push_back({victim.second, victim.first});
      spdlog::warn("depth order cycle: ignoring seg{} in front of seg{}", victim.second, victim.first);
      if (--indegree[static_cast<std::size_t>(victim.second)] == 0) ready.insert(key(victim.second));
      continue;
    }
    const int id = ready.begin()->second;
    ready.erase(ready.begin());
    placed[static_cast<std::size_t>(id)] = true;
    out.order.push_back(id);
    for (auto it = edges.lower_bound({id, std::numeric_limits<int>::min()}); it != edges.end() && it->first == id;
         ++it) {
      if (--indegree[static_cast<std::size_t>(it->second)] == 0) ready.insert(key(it->second));
    }
  }
  return out;
}

DepthOrder depth_order(const Scene& scene, const MotionMap& motions, const DepthConfig& cfg) {
  const std::size_t n = scene.segments.size();
  std::vector<Mask> masks;
  std::vector<BBox> boxes;
  masks.reserve(n);
  for (const Segment& seg : scene.segments) {
    const TransformedSegment t = apply_motion(seg, motion_for(motions, seg));
    masks.push_back(rasterize_segment(t, scene.width, scene.height));
    std::vector<Vec2> all;
    for (const Path& p : t.paths) all.insert(all.end(), p.begin(), p.end());
    boxes.push_back(bbox(all));
  }
  std::vector<PairVerdict> verdicts;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const BBox& a = boxes[i];
      const BBox& b = boxes[j];
      if (a.max_x < b.min_x || b.max_x < a.min_x || a.max_y < b.min_y || b.max_y < a.min_y) continue;
      PairVerdict v = depth_order_pair(masks[i], masks[j], cfg);
      if (v.length_i == 0 && v.length_j == 0 && v.verdict == Verdict::Undetermined) {
        // Either disjoint rasters or a single shared pixel; only keep real overlaps.
        bool shared = false;
        for (std::size_t k = 0; k < masks[i].data.size() && !shared; ++k) {
          shared = masks[i].data[k] && masks[j].data[k];
        }
        if (!shared) continue;
      }
      v.i = static_cast<int>(i);
      v.j = static_cast<int>(j);
      verdicts.push_back(v);
    }
  }
  return depth_sort(scene, std::move(verdicts));
}

DepthOrder resolve_order(const Scene& scene, const MotionMap& motions, OrderMode mode, const DepthConfig& cfg) {
  switch (mode) {
    case OrderMode::Auto: return depth_order(scene, motions, cfg);
    case OrderMode::InitialConfig: return depth_order(scene, {}, cfg);
    case OrderMode::Input: break;
  }
  DepthOrder out;
  for (const Segment& seg : scene.segments) out.order.push_back(seg.id);
  return out;
}

RgbImage rasterize(const Scene& scene, const MotionMap& motions, const std::vector<int>& order, int width,
                   int height) {
  RgbImage img(width, height, scene.background);
  const double fx = scene.width > 0 ? static_cast<double>(width) / scene.width : 1.0;
  const double fy = scene.height > 0 ? static_cast<double>(height) / scene.height : 1.0;
  for (int id : order) {
    const Segment& seg = scene.segment(id);
    TransformedSegment t = apply_motion(seg, motion_for(motions, seg));
    if (fx != 1.0 || fy != 1.0) {
      for (Path& p : t.paths) {
        for (Vec2& q : p) q = {q.x * fx, q.y * fy};
      }
    }
    scanline_spans(t.paths, width, height, [&](int y, int x0, int x1) {
      for (int x = x0; x < x1; ++x) img.set(x, y, seg.color);
    });
  }
  return img;
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  if (std::string_view(buf) == "-0.000") return "0.000";
  return buf;
}

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

}  // namespace

std::string export_svg(const Scene& scene, const MotionMap& motions, const std::vector<int>& order) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(scene.width) +
         "\" height=\"" + std::to_string(scene.height) + "\" viewBox=\"0 0 " + std::to_string(scene.width) + " " +
         std::to_string(scene.height) + "\">\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(scene.width) + "\" height=\"" +
         std::to_string(scene.height) + "\" fill=\"" + hex(scene.background) + "\"/>\n";
  for (int id : order) {
    const Segment& seg = scene.segment(id);
    const TransformedSegment t = apply_motion(seg, motion_for(motions, seg));
    std::string d;
    for (const Path& p : t.paths) {
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (!d.empty()) d += ' ';
        d += k == 0 ? "M " : "L ";
        d += fixed3(p[k].x) + " " + fixed3(p[k].y);
      }
      d += " Z";
    }
    out += "  <path id=\"seg" + std::to_string(id) + "\" d=\"" + d + "\" fill=\"" + hex(seg.color) +
           "\" fill-rule=\"evenodd\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace iconforge
