#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace iconforge {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  constexpr Vec2& operator+=(Vec2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// A closed polyline; the last vertex connects back to the first.
using Path = std::vector<Vec2>;

struct BBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double diagonal() const { return std::hypot(width(), height()); }
  Vec2 center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }
  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Exact coordinate extrema. Throws GeometryError("empty region") on an
/// empty set.
BBox bbox(std::span<const Vec2> points);

Vec2 mean_point(std::span<const Vec2> points);

double signed_area(std::span<const Vec2> loop);
double perimeter(std::span<const Vec2> loop);

/// Even-odd crossing test against one closed loop.
bool point_in_loop(Vec2 p, std::span<const Vec2> loop);

/// True when some pair of non-adjacent edges intersects.
bool self_intersects(std::span<const Vec2> loop);

struct SegmentProjection {
  Vec2 point;     // closest point on the segment
  double t = 0;   // parameter in [0, 1]
  double dist2 = 0;
};

SegmentProjection project_on_segment(Vec2 p, Vec2 a, Vec2 b);

/// Arc-length uniform resampling of a closed loop into n points, starting at
/// loop[0] and walking in vertex order.
std::vector<Vec2> resample_closed(std::span<const Vec2> loop, int n);

/// Removes consecutive duplicates and vertices lying on the line through
/// their neighbours.
Path remove_collinear(std::span<const Vec2> loop, double eps = 1e-9);

/// Ramer-Douglas-Peucker on a closed loop; keeps at least three vertices.
Path simplify_closed(std::span<const Vec2> loop, double tolerance);

}  // namespace iconforge
