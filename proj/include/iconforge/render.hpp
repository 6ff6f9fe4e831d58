#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iconforge/raster.hpp"
#include "iconforge/scene.hpp"

namespace iconforge {

enum class Verdict { IFront, JFront, Undetermined };

struct DepthConfig {
  int max_boundary_points = 32;
  /// |L_i - L_j| <= band * max(L_i, L_j) is undetermined.
  double band = 0.10;
};

struct PairVerdict {
  int i = 0;
  int j = 0;
  Verdict verdict = Verdict::Undetermined;
  int length_i = 0;  // longest inner path, BFS steps
  int length_j = 0;
};

struct DepthOrder {
  std::vector<int> order;  // back to front (front-most last)
  std::vector<PairVerdict> verdicts;
  std::vector<std::pair<int, int>> broken;  // (front, back) verdicts dropped to break cycles
};

enum class OrderMode { Auto, Input, InitialConfig };

OrderMode parse_order_mode(std::string_view text);

/// Front/back decision for two rasters from the longest constrained inner
/// path between boundary points of their intersection. The segment with the
/// shorter path is in front.
PairVerdict depth_order_pair(const Mask& si, const Mask& sj, const DepthConfig& cfg = {});

/// Topological order of the "in front of" relation. Ready segments and
/// undetermined pairs are ordered by (z_hint, id); a cycle is broken by
/// dropping its lowest-id verdict.
DepthOrder depth_sort(const Scene& scene, std::vector<PairVerdict> verdicts);

/// Verdicts for every intersecting pair of the scene under `motions`, sorted.
DepthOrder depth_order(const Scene& scene, const MotionMap& motions, const DepthConfig& cfg = {});

/// Back-to-front order for the given mode. Input keeps id order.
DepthOrder resolve_order(const Scene& scene, const MotionMap& motions, OrderMode mode,
                         const DepthConfig& cfg = {});

/// Background fill, then each segment's transformed paths filled with its
/// colour (even-odd) in `order`.
RgbImage rasterize(const Scene& scene, const MotionMap& motions, const std::vector<int>& order, int width,
                   int height);
inline RgbImage rasterize(const Scene& scene, const MotionMap& motions, const std::vector<int>& order) {
  return rasterize(scene, motions, order, scene.width, scene.height);
}

/// SVG 1.1 with a background rect and one even-odd path per segment.
std::string export_svg(const Scene& scene, const MotionMap& motions, const std::vector<int>& order);

}  // namespace iconforge
