#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iconforge/geometry.hpp"
#include "iconforge/raster.hpp"

namespace iconforge {

struct SceneConfig {
  int samples_per_path = 64;
  int proxy_rays = 16;
  double proxy_ratio = 0.9;
  int proxy_stride = 4;
  /// Mask ingestion: contour simplification tolerance in px (0 keeps every
  /// corner of the traced pixel boundary).
  double simplify_tolerance = 0.0;
  int min_component_px = 4;
};

/// "(Object:Part)" with an instance counter for repeated object names.
struct Label {
  std::string object;
  std::string part;
  int instance = 0;

  std::string text() const { return "(" + object + ":" + part + ")"; }
  friend bool operator==(const Label&, const Label&) = default;
};

/// Parses "Object:Part" (parentheses optional).
Label parse_label(std::string_view text);

struct Segment {
  int id = 0;
  Label label;
  Rgb color;
  std::vector<Path> paths;
  /// Arc-length uniform samples, samples_per_path consecutive points per path.
  std::vector<Vec2> samples;
  std::vector<Vec2> proxy_samples;
  std::optional<int> z_hint;
  /// Rotation/scale pivot: centroid of the rest samples.
  Vec2 pivot;
  int samples_per_path = 0;

  std::span<const Vec2> path_samples(std::size_t path) const {
    return std::span<const Vec2>(samples).subspan(path * samples_per_path, samples_per_path);
  }
};

struct Scene {
  int width = 512;
  int height = 512;
  Rgb background{255, 255, 255};
  std::vector<Segment> segments;  // segments[i].id == i

  const Segment& segment(int id) const;
  bool has_segment(int id) const { return id >= 0 && id < static_cast<int>(segments.size()); }
};

/// p' = t + R(theta) * diag(sx, sy) * (p - pivot) + pivot, theta in degrees.
struct MotionParams {
  static constexpr double kMinScale = 0.05;
  static constexpr double kMaxScale = 20.0;

  double tx = 0.0;
  double ty = 0.0;
  double theta_deg = 0.0;
  double sx = 1.0;
  double sy = 1.0;
  Vec2 pivot;

  bool is_identity() const { return tx == 0 && ty == 0 && theta_deg == 0 && sx == 1 && sy == 1; }
  Vec2 apply(Vec2 p) const;
  friend bool operator==(const MotionParams&, const MotionParams&) = default;
};

using MotionMap = std::map<int, MotionParams>;

MotionParams identity_motion(const Segment& seg);
/// Identity for every segment without an explicit entry.
MotionParams motion_for(const MotionMap& motions, const Segment& seg);

struct TransformedSegment {
  std::vector<Path> paths;
  std::vector<Vec2> samples;
  std::vector<Vec2> proxy_samples;
};

std::vector<Vec2> apply_motion(std::span<const Vec2> points, const MotionParams& m);
TransformedSegment apply_motion(const Segment& seg, const MotionParams& m);

/// Validates the paths and fills samples, pivot and proxy samples.
Segment make_segment(int id, Label label, Rgb color, std::vector<Path> paths,
                     std::optional<int> z_hint, int width, int height,
                     const SceneConfig& cfg = {});

Scene parse_scene(std::string_view document, const SceneConfig& cfg = {});
Scene load_scene(const std::filesystem::path& file, const SceneConfig& cfg = {});
std::string dump_scene(const Scene& scene);
/// Scene whose paths are the transformed paths (samples are recomputed).
Scene apply_motions(const Scene& scene, const MotionMap& motions, const SceneConfig& cfg = {});

/// Interior grid points (pixel centres on a stride grid) where at least
/// ratio * rays of the uniformly spaced rays hit the raster.
std::vector<Vec2> proxy_from_raster(const Mask& raster, int rays, double ratio, int stride);
/// True when at least ratio * rays rays from the centre of pixel (x, y) hit
/// the raster.
bool ray_majority(const Mask& raster, int x, int y, int rays, double ratio);
std::vector<Vec2> proxy_segment(const Segment& seg, int width, int height, int rays = 16,
                                double ratio = 0.9, int stride = 4);

Mask rasterize_segment(const Segment& seg, int width, int height);
Mask rasterize_segment(const TransformedSegment& seg, int width, int height);

/// Traces the outer contour of every 4-connected component per mask value.
/// Holes are dropped; colours are region means over the image.
Scene ingest_mask(const LabelRaster& mask, const RgbImage& image,
                  const std::map<int, std::string>& labels, const SceneConfig& cfg = {});
Scene ingest_mask_files(const std::filesystem::path& mask_png,
                        const std::filesystem::path& image_png,
                        const std::filesystem::path& label_map, const SceneConfig& cfg = {});

/// Outer boundary of the 4-connected component containing (seed_x, seed_y)
/// in `component` (pixels equal to `value`), vertices at pixel corners.
Path trace_outer_boundary(const Grid<int>& component, int value, int seed_x, int seed_y);

}  // namespace iconforge
