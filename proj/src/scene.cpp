#include "iconforge/scene.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "iconforge/errors.hpp"

namespace iconforge {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Label parse_label(std::string_view text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  const auto colon = s.find(':');
  if (colon == std::string::npos) return {trim(s), trim(s), 0};
  return {trim(s.substr(0, colon)), trim(s.substr(colon + 1)), 0};
}

const Segment& Scene::segment(int id) const {
  if (!has_segment(id)) throw ValidationError("no segment with id " + std::to_string(id));
  return segments[static_cast<std::size_t>(id)];
}

Vec2 MotionParams::apply(Vec2 p) const {
  if (is_identity()) return p;
  const double rad = deg_to_rad(theta_deg);
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const Vec2 q{sx * (p.x - pivot.x), sy * (p.y - pivot.y)};
  return {tx + c * q.x - s * q.y + pivot.x, ty + s * q.x + c * q.y + pivot.y};
}

MotionParams identity_motion(const Segment& seg) {
  MotionParams m;
  m.pivot = seg.pivot;
  return m;
}

MotionParams motion_for(const MotionMap& motions, const Segment& seg) {
  const auto it = motions.find(seg.id);
  return it == motions.end() ? identity_motion(seg) : it->second;
}

std::vector<Vec2> apply_motion(std::span<const Vec2> points, const MotionParams& m) {
  std::vector<Vec2> out(points.begin(), points.end());
  if (m.is_identity()) return out;
  for (Vec2& p : out) p = m.apply(p);
  return out;
}

TransformedSegment apply_motion(const Segment& seg, const MotionParams& m) {
  TransformedSegment out;
  out.paths.reserve(seg.paths.size());
  for (const Path& path : seg.paths) out.paths.push_back(apply_motion(path, m));
  out.samples = apply_motion(seg.samples, m);
  out.proxy_samples = apply_motion(seg.proxy_samples, m);
  return out;
}

// ---------------------------------------------------------------------------
// Proxy segments

bool ray_majority(const Mask& raster, int x, int y, int rays, double ratio) {
  if (raster.get(x, y)) return true;
  const int needed = static_cast<int>(std::ceil(ratio * rays - 1e-9));
  const int allowed_misses = rays - needed;
  int misses = 0;
  const Vec2 origin{x + 0.5, y + 0.5};
  for (int k = 0; k < rays; ++k) {
    const double a = 2.0 * std::numbers::pi * k / rays;
    const Vec2 dir{std::cos(a), std::sin(a)};
    bool hit = false;
    for (double t = 0.5;; t += 0.5) {
      const Vec2 p = origin + t * dir;
      const int px = static_cast<int>(std::floor(p.x));
      const int py = static_cast<int>(std::floor(p.y));
      if (!raster.contains(px, py)) break;
      if (raster.at(px, py)) {
        hit = true;
        break;
      }
    }
    if (!hit && ++misses > allowed_misses) return false;
  }
  return true;
}

namespace {

// Stride grid aligned to global pixel coordinates; the raster covers
// [ox, ox + width) x [oy, oy + height).
std::vector<Vec2> proxy_grid(const Mask& raster, int ox, int oy, int rays, double ratio,
                             int stride) {
  std::vector<Vec2> out;
  const auto first = [&](int o) { return ((o % stride) + stride) % stride == 0 ? o : o + (stride - ((o % stride) + stride) % stride); };
  for (int gy = first(oy); gy < oy + raster.height; gy += stride) {
    for (int gx = first(ox); gx < ox + raster.width; gx += stride) {
      if (ray_majority(raster, gx - ox, gy - oy, rays, ratio)) out.push_back({gx + 0.5, gy + 0.5});
    }
  }
  return out;
}

struct LocalRaster {
  Mask mask;
  int ox = 0;
  int oy = 0;
};

LocalRaster local_raster(std::span<const Path> paths) {
  double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
  for (const Path& p : paths) {
    const BBox b = bbox(p);
    lo_x = std::min(lo_x, b.min_x);
    lo_y = std::min(lo_y, b.min_y);
    hi_x = std::max(hi_x, b.max_x);
    hi_y = std::max(hi_y, b.max_y);
  }
  LocalRaster out;
  out.ox = static_cast<int>(std::floor(lo_x)) - 1;
  out.oy = static_cast<int>(std::floor(lo_y)) - 1;
  const int w = static_cast<int>(std::ceil(hi_x)) + 2 - out.ox;
  const int h = static_cast<int>(std::ceil(hi_y)) + 2 - out.oy;
  std::vector<Path> shifted;
  for (const Path& p : paths) {
    Path q;
    for (const Vec2& v : p) q.push_back({v.x - out.ox, v.y - out.oy});
    shifted.push_back(std::move(q));
  }
  out.mask = rasterize_loops(shifted, w, h);
  return out;
}

}  // namespace

std::vector<Vec2> proxy_from_raster(const Mask& raster, int rays, double ratio, int stride) {
  return proxy_grid(raster, 0, 0, rays, ratio, stride);
}

std::vector<Vec2> proxy_segment(const Segment& seg, int width, int height, int rays,
                                double ratio, int stride) {
  if (rays < 8) throw ValidationError("proxy ray count must be >= 8");
  if (!(ratio > 0 && ratio <= 1)) throw ValidationError("proxy ratio must be in (0, 1]");
  const LocalRaster local = local_raster(seg.paths);
  std::vector<Vec2> pts = proxy_grid(local.mask, local.ox, local.oy, rays, ratio, stride);
  std::erase_if(pts, [&](Vec2 p) { return p.x < 0 || p.y < 0 || p.x > width || p.y > height; });
  if (pts.empty()) {
    spdlog::warn("segment {}: proxy grid is empty, using boundary samples", seg.id);
    return seg.samples;
  }
  return pts;
}

Mask rasterize_segment(const Segment& seg, int width, int height) {
  return rasterize_loops(seg.paths, width, height);
}

Mask rasterize_segment(const TransformedSegment& seg, int width, int height) {
  return rasterize_loops(seg.paths, width, height);
}

// ---------------------------------------------------------------------------
// Construction and I/O

Segment make_segment(int id, Label label, Rgb color, std::vector<Path> paths,
                     std::optional<int> z_hint, int width, int height, const SceneConfig& cfg) {
  if (paths.empty()) throw GeometryError("segment " + std::to_string(id) + ": no paths");
  Segment seg;
  seg.id = id;
  seg.label = std::move(label);
  seg.color = color;
  seg.z_hint = z_hint;
  seg.samples_per_path = cfg.samples_per_path;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    Path path = std::move(paths[k]);
    while (path.size() > 1 && path.front() == path.back()) path.pop_back();
    const std::string where = "segment " + std::to_string(id) + " path " + std::to_string(k);
    if (path.size() < 3) throw GeometryError(where + ": open or degenerate path (fewer than 3 vertices)");
    for (const Vec2& v : path) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw GeometryError(where + ": non-finite vertex");
    }
    if (std::abs(signed_area(path)) < 1e-9) throw GeometryError(where + ": degenerate path (zero area)");
    if (self_intersects(path)) throw GeometryError(where + ": self-intersecting path");
    std::vector<Vec2> s = resample_closed(path, cfg.samples_per_path);
    seg.samples.insert(seg.samples.end(), s.begin(), s.end());
    seg.paths.push_back(std::move(path));
  }
  seg.pivot = mean_point(seg.samples);
  seg.proxy_samples =
      proxy_segment(seg, width, height, cfg.proxy_rays, cfg.proxy_ratio, cfg.proxy_stride);
  return seg;
}

namespace {

int line_of_offset(std::string_view doc, std::size_t offset) {
  offset = std::min(offset, doc.size());
  return 1 + static_cast<int>(std::count(doc.begin(), doc.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

Rgb parse_rgb(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ParseError(field + ": expected [r, g, b]");
  Rgb c;
  std::uint8_t* out[3] = {&c.r, &c.g, &c.b};
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ParseError(field + ": expected numeric channel");
    const double v = j[i].get<double>();
    if (v < 0 || v > 255) throw ParseError(field + ": channel out of range [0, 255]");
    *out[i] = static_cast<std::uint8_t>(std::lround(v));
  }
  return c;
}

Vec2 parse_point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError(field + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Scene parse_scene(std::string_view document, const SceneConfig& cfg) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scene document: ") + e.what(),
                     line_of_offset(document, e.byte));
  }
  if (!doc.is_object()) throw ParseError("scene document must be an object");
  Scene scene;
  if (doc.contains("width")) {
    if (!doc["width"].is_number_integer()) throw ParseError("width: expected integer");
    scene.width = doc["width"].get<int>();
  }
  if (doc.contains("height")) {
    if (!doc["height"].is_number_integer()) throw ParseError("height: expected integer");
    scene.height = doc["height"].get<int>();
  }
  if (scene.width <= 0 || scene.height <= 0) throw ParseError("width and height must be positive");
  if (doc.contains("background")) scene.background = parse_rgb(doc["background"], "background");
  if (!doc.contains("segments") || !doc["segments"].is_array()) {
    throw ParseError("segments: expected array");
  }

  struct Raw {
    int id;
    Label label;
    Rgb color;
    std::optional<int> z;
    std::vector<Path> paths;
  };
  std::vector<Raw> raws;
  std::set<int> seen;
  const json& segs = doc["segments"];
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const json& s = segs[i];
    const std::string at = "segments[" + std::to_string(i) + "]";
    if (!s.is_object()) throw ParseError(at + ": expected object");
    if (!s.contains("id") || !s["id"].is_number_integer()) throw ParseError(at + ".id: expected integer");
    Raw raw;
    raw.id = s["id"].get<int>();
    if (!seen.insert(raw.id).second) throw ParseError("duplicate segment id " + std::to_string(raw.id));
    if (!s.contains("label")) throw ParseError(at + ".label: missing");
    const json& l = s["label"];
    if (l.is_string()) {
      raw.label = parse_label(l.get<std::string>());
    } else if (l.is_object() && l.contains("object") && l.contains("part")) {
      raw.label.object = l["object"].get<std::string>();
      raw.label.part = l["part"].get<std::string>();
      raw.label.instance = l.value("instance", 0);
    } else {
      throw ParseError(at + ".label: expected {object, part, instance}");
    }
    raw.color = s.contains("color") ? parse_rgb(s["color"], at + ".color") : Rgb{0, 0, 0};
    if (s.contains("z") && !s["z"].is_null()) {
      if (!s["z"].is_number_integer()) throw ParseError(at + ".z: expected integer");
      raw.z = s["z"].get<int>();
    }
    if (!s.contains("paths") || !s["paths"].is_array()) throw ParseError(at + ".paths: expected array");
    for (std::size_t k = 0; k < s["paths"].size(); ++k) {
      const json& p = s["paths"][k];
      const std::string pat = at + ".paths[" + std::to_string(k) + "]";
      if (!p.is_array()) throw ParseError(pat + ": expected array of points");
      Path path;
      for (std::size_t v = 0; v < p.size(); ++v) {
        path.push_back(parse_point(p[v], pat + "[" + std::to_string(v) + "]"));
      }
      raw.paths.push_back(std::move(path));
    }
    raws.push_back(std::move(raw));
  }
  std::sort(raws.begin(), raws.end(), [](const Raw& a, const Raw& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < raws.size(); ++i) {
    if (raws[i].id != static_cast<int>(i)) {
      throw ParseError("segment ids must be dense integers starting at 0 (missing id " +
                       std::to_string(i) + ")");
    }
  }
  for (Raw& raw : raws) {
    scene.segments.push_back(make_segment(raw.id, std::move(raw.label), raw.color,
                                          std::move(raw.paths), raw.z, scene.width, scene.height,
                                          cfg));
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& file, const SceneConfig& cfg) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open scene file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scene(ss.str(), cfg);
  } catch (const ParseError& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

std::string dump_scene(const Scene& scene) {
  json doc;
  doc["width"] = scene.width;
  doc["height"] = scene.height;
  doc["background"] = {scene.background.r, scene.background.g, scene.background.b};
  doc["segments"] = json::array();
  for (const Segment& seg : scene.segments) {
    json s;
    s["id"] = seg.id;
    s["label"] = {{"object", seg.label.object}, {"part", seg.label.part}, {"instance", seg.label.instance}};
    s["color"] = {seg.color.r, seg.color.g, seg.color.b};
    if (seg.z_hint) s["z"] = *seg.z_hint;
    s["paths"] = json::array();
    for (const Path& p : seg.paths) {
      json pj = json::array();
      for (const Vec2& v : p) pj.push_back({v.x, v.y});
      s["paths"].push_back(std::move(pj));
    }
    doc["segments"].push_back(std::move(s));
  }
  return doc.dump(2);
}

Scene apply_motions(const Scene& scene, const MotionMap& motions, const SceneConfig& cfg) {
  Scene out;
  out.width = scene.width;
  out.height = scene.height;
  out.background = scene.background;
  for (const Segment& seg : scene.segments) {
    const MotionParams m = motion_for(motions, seg);
    std::vector<Path> paths;
    for (const Path& p : seg.paths) paths.push_back(apply_motion(p, m));
    out.segments.push_back(make_segment(seg.id, seg.label, seg.color, std::move(paths), seg.z_hint,
                                        scene.width, scene.height, cfg));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mask ingestion

Path trace_outer_boundary(const Grid<int>& comp, int value, int seed_x, int seed_y) {
  static constexpr int dx[4] = {1, 0, -1, 0};  // E, S, W, N (y down)
  static constexpr int dy[4] = {0, 1, 0, -1};
  const auto in = [&](int x, int y) { return comp.contains(x, y) && comp.at(x, y) == value; };
  // Pixels diagonally ahead of corner (cx, cy) for each heading.
  const auto ahead_right = [&](int cx, int cy, int d) {
    switch (d) {
      case 0: return in(cx, cy);
      case 1: return in(cx - 1, cy);
      case 2: return in(cx - 1, cy - 1);
      default: return in(cx, cy - 1);
    }
  };
  const auto ahead_left = [&](int cx, int cy, int d) {
    switch (d) {
      case 0: return in(cx, cy - 1);
      case 1: return in(cx, cy);
      case 2: return in(cx - 1, cy);
      default: return in(cx - 1, cy - 1);
    }
  };
  Path out;
  int cx = seed_x;
  int cy = seed_y;
  int d = 0;
  out.push_back({static_cast<double>(cx), static_cast<double>(cy)});
  const std::size_t limit = 4 * comp.data.size() + 8;
  for (std::size_t steps = 0; steps < limit; ++steps) {
    cx += dx[d];
    cy += dy[d];
    int nd = d;
    if (!ahead_right(cx, cy, d)) {
      nd = (d + 1) % 4;
    } else if (ahead_left(cx, cy, d)) {
      nd = (d + 3) % 4;
    }
    if (cx == seed_x && cy == seed_y) break;
    if (nd != d) out.push_back({static_cast<double>(cx), static_cast<double>(cy)});
    d = nd;
  }
  return remove_collinear(out);
}

Scene ingest_mask(const LabelRaster& mask, const RgbImage& image,
                  const std::map<int, std::string>& labels, const SceneConfig& cfg) {
  if (mask.width != image.width || mask.height != image.height) {
    throw ValidationError("mask and image dimensions differ");
  }
  std::set<int> unlabeled;
  for (int v : mask.data) {
    if (v != 0 && !labels.contains(v)) unlabeled.insert(v);
  }
  if (!unlabeled.empty()) {
    std::string list;
    for (int v : unlabeled) list += (list.empty() ? "" : ", ") + std::to_string(v);
    throw ValidationError("unlabeled mask values: " + list);
  }

  Scene scene;
  scene.width = mask.width;
  scene.height = mask.height;
  // Background colour: most common colour among unlabeled pixels.
  {
    std::map<std::tuple<int, int, int>, int> counts;
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        if (mask.at(x, y) == 0) {
          const Rgb c = image.get(x, y);
          ++counts[{c.r, c.g, c.b}];
        }
      }
    }
    if (!counts.empty()) {
      const auto best = std::max_element(counts.begin(), counts.end(),
                                         [](const auto& a, const auto& b) { return a.second < b.second; });
      scene.background = {static_cast<std::uint8_t>(std::get<0>(best->first)),
                          static_cast<std::uint8_t>(std::get<1>(best->first)),
                          static_cast<std::uint8_t>(std::get<2>(best->first))};
    }
  }

  Grid<int> comp(mask.width, mask.height, 0);
  int next_comp = 0;
  struct Component {
    int value;
    int id;
    int seed_x, seed_y;
    std::size_t size;
    double r, g, b;
  };
  std::vector<Component> comps;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const int v = mask.at(x, y);
      if (v == 0 || comp.at(x, y) != 0) continue;
      Component c{v, ++next_comp, x, y, 0, 0, 0, 0};
      std::deque<std::pair<int, int>> queue{{x, y}};
      comp.at(x, y) = c.id;
      while (!queue.empty()) {
        const auto [px, py] = queue.front();
        queue.pop_front();
        ++c.size;
        const Rgb col = image.get(px, py);
        c.r += col.r;
        c.g += col.g;
        c.b += col.b;
        const int nx[4] = {px + 1, px - 1, px, px};
        const int ny[4] = {py, py, py + 1, py - 1};
        for (int k = 0; k < 4; ++k) {
          if (mask.contains(nx[k], ny[k]) && mask.at(nx[k], ny[k]) == v && comp.at(nx[k], ny[k]) == 0) {
            comp.at(nx[k], ny[k]) = c.id;
            queue.emplace_back(nx[k], ny[k]);
          }
        }
      }
      comps.push_back(c);
    }
  }
  std::stable_sort(comps.begin(), comps.end(),
                   [](const Component& a, const Component& b) { return a.value < b.value; });
  std::map<int, int> instances;
  for (const Component& c : comps) {
    if (static_cast<int>(c.size) < cfg.min_component_px) {
      spdlog::warn("mask value {}: skipping component of {} px at ({}, {})", c.value, c.size,
                   c.seed_x, c.seed_y);
      continue;
    }
    Path outline = trace_outer_boundary(comp, c.id, c.seed_x, c.seed_y);
    if (cfg.simplify_tolerance > 0) outline = simplify_closed(outline, cfg.simplify_tolerance);
    Label label = parse_label(labels.at(c.value));
    label.instance = instances[c.value]++;
    const double n = static_cast<double>(c.size);
    const Rgb color{static_cast<std::uint8_t>(std::lround(c.r / n)),
                    static_cast<std::uint8_t>(std::lround(c.g / n)),
                    static_cast<std::uint8_t>(std::lround(c.b / n))};
    const int id = static_cast<int>(scene.segments.size());
    scene.segments.push_back(make_segment(id, std::move(label), color, {std::move(outline)},
                                          std::nullopt, scene.width, scene.height, cfg));
  }
  return scene;
}

Scene ingest_mask_files(const std::filesystem::path& mask_png, const std::filesystem::path& image_png,
                        const std::filesystem::path& label_map, const SceneConfig& cfg) {
  const LabelRaster mask = read_png_labels(mask_png);
  const RgbImage image = read_png_rgb(image_png);
  std::ifstream in(label_map);
  if (!in) throw IoError("cannot open label map " + label_map.string());
  std::map<int, std::string> labels;
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(label_map.string() + ": " + e.what());
  }
  for (const auto& [key, value] : doc.items()) {
    labels[std::stoi(key)] = value.get<std::string>();
  }
  return ingest_mask(mask, image, labels, cfg);
}

}  // namespace iconforge
