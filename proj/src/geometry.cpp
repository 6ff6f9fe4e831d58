#include "iconforge/geometry.hpp"

#include <algorithm>
#include <limits>

#include "iconforge/errors.hpp"

namespace iconforge {

BBox bbox(std::span<const Vec2> points) {
  if (points.empty()) throw GeometryError("empty region");
  BBox box{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const Vec2& p : points.subspan(1)) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  return box;
}

Vec2 mean_point(std::span<const Vec2> points) {
  if (points.empty()) throw GeometryError("empty region");
  Vec2 sum;
  for (const Vec2& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

double signed_area(std::span<const Vec2> loop) {
  double twice = 0.0;
  for (std::size_t i = 0, n = loop.size(); i < n; ++i) {
    twice += cross(loop[i], loop[(i + 1) % n]);
  }
  return twice / 2;
}

double perimeter(std::span<const Vec2> loop) {
  double len = 0.0;
  for (std::size_t i = 0, n = loop.size(); i < n; ++i) {
    len += norm(loop[(i + 1) % n] - loop[i]);
  }
  return len;
}

bool point_in_loop(Vec2 p, std::span<const Vec2> loop) {
  bool inside = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = loop[i];
    const Vec2 b = loop[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

bool self_intersects(std::span<const Vec2> loop) {
  const std::size_t n = loop.size();
  if (n < 4) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = loop[i];
    const Vec2 b = loop[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // shares vertex 0
      if (segments_intersect(a, b, loop[j], loop[(j + 1) % n])) return true;
    }
  }
  return false;
}

SegmentProjection project_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + t * ab;
  return {q, t, norm2(p - q)};
}

std::vector<Vec2> resample_closed(std::span<const Vec2> loop, int n) {
  std::vector<Vec2> out;
  if (loop.empty() || n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  const double total = perimeter(loop);
  if (total <= 0) {
    out.assign(static_cast<std::size_t>(n), loop[0]);
    return out;
  }
  const double step = total / n;
  std::size_t edge = 0;
  double edge_start = 0.0;  // arc length at loop[edge]
  double edge_len = norm(loop[1 % loop.size()] - loop[0]);
  for (int k = 0; k < n; ++k) {
    const double s = step * k;
    while (edge + 1 < loop.size() && s > edge_start + edge_len) {
      edge_start += edge_len;
      ++edge;
      edge_len = norm(loop[(edge + 1) % loop.size()] - loop[edge]);
    }
    const Vec2 a = loop[edge];
    const Vec2 b = loop[(edge + 1) % loop.size()];
    const double t = edge_len > 0 ? std::clamp((s - edge_start) / edge_len, 0.0, 1.0) : 0.0;
    // Exact vertices when the sample lands on a corner.
    if (t == 0.0) {
      out.push_back(a);
    } else if (t == 1.0) {
      out.push_back(b);
    } else {
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

Path remove_collinear(std::span<const Vec2> loop, double eps) {
  Path pts;
  for (const Vec2& p : loop) {
    if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
  }
  while (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  bool changed = true;
  while (changed && pts.size() > 3) {
    changed = false;
    Path next;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = pts[(i + n - 1) % n];
      const Vec2 cur = pts[i];
      const Vec2 nxt = pts[(i + 1) % n];
      const Vec2 u = cur - prev;
      const Vec2 v = nxt - cur;
      if (std::abs(cross(u, v)) <= eps * norm(u) * norm(v) && dot(u, v) > 0) {
        changed = true;
        continue;
      }
      next.push_back(cur);
    }
    if (next.size() < 3) break;
    pts = std::move(next);
  }
  return pts;
}

namespace {

void rdp(std::span<const Vec2> pts, std::size_t first, std::size_t last, double tol,
         std::vector<bool>& keep) {
  if (last <= first + 1) return;
  double worst = -1.0;
  std::size_t index = first;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = project_on_segment(pts[i], pts[first], pts[last]).dist2;
    if (d > worst) {
      worst = d;
      index = i;
    }
  }
  if (worst > tol * tol) {
    keep[index] = true;
    rdp(pts, first, index, tol, keep);
    rdp(pts, index, last, tol, keep);
  }
}

}  // namespace

Path simplify_closed(std::span<const Vec2> loop, double tolerance) {
  const std::size_t n = loop.size();
  if (n <= 3 || tolerance <= 0) return Path(loop.begin(), loop.end());
  // Split the loop at vertex 0 and the vertex farthest from it.
  std::size_t far = 0;
  double best = -1;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = norm2(loop[i] - loop[0]);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  std::vector<Vec2> closed(loop.begin(), loop.end());
  closed.push_back(loop[0]);
  std::vector<bool> keep(closed.size(), false);
  keep[0] = keep[far] = keep[closed.size() - 1] = true;
  rdp(closed, 0, far, tolerance, keep);
  rdp(closed, far, closed.size() - 1, tolerance, keep);
  Path out;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i) {
    if (keep[i]) out.push_back(closed[i]);
  }
  if (out.size() < 3) return Path(loop.begin(), loop.end());
  return out;
}

}  // namespace iconforge
