#include "iconforge/eval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "iconforge/errors.hpp"

namespace iconforge {

using dsl::Node;
using dsl::Op;

// ---------------------------------------------------------------------------
// DiffScalar

DiffScalar& DiffScalar::operator+=(const DiffScalar& o) {
  value += o.value;
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += o.grad[i];
  return *this;
}

DiffScalar& DiffScalar::operator-=(const DiffScalar& o) {
  value -= o.value;
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= o.grad[i];
  return *this;
}

DiffScalar& DiffScalar::operator*=(double s) {
  value *= s;
  for (double& g : grad) g *= s;
  return *this;
}

DiffScalar operator+(DiffScalar a, const DiffScalar& b) { return a += b; }
DiffScalar operator-(DiffScalar a, const DiffScalar& b) { return a -= b; }
DiffScalar operator*(DiffScalar a, double s) { return a *= s; }

DiffScalar operator*(const DiffScalar& a, const DiffScalar& b) {
  DiffScalar out(a.value * b.value, a.grad.size());
  for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  return out;
}

DiffScalar operator/(const DiffScalar& a, const DiffScalar& b) {
  DiffScalar out(a.value / b.value, a.grad.size());
  const double inv2 = 1.0 / (b.value * b.value);
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    out.grad[i] = (a.grad[i] * b.value - a.value * b.grad[i]) * inv2;
  }
  return out;
}

DiffScalar abs(DiffScalar a) {
  if (a.value < 0) a *= -1.0;
  return a;
}

DiffScalar relu(DiffScalar a) {
  if (a.value <= 0) return DiffScalar(0.0, a.grad.size());
  return a;
}

DiffScalar min(const DiffScalar& a, const DiffScalar& b) { return b.value < a.value ? b : a; }
DiffScalar max(const DiffScalar& a, const DiffScalar& b) { return b.value > a.value ? b : a; }

// ---------------------------------------------------------------------------
// Evaluator

Evaluator::Evaluator(const Scene& scene, std::vector<ParamRef> params, EvalConfig cfg)
    : scene_(&scene), params_(std::move(params)), cfg_(cfg), frames_(scene.segments.size()) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const ParamRef& p = params_[i];
    if (!scene.has_segment(p.segment)) throw EvalError("parameter for unknown segment " + std::to_string(p.segment));
    frames_[static_cast<std::size_t>(p.segment)].slot_index[static_cast<std::size_t>(p.slot)] = static_cast<int>(i);
  }
  set_motions({});
}

void Evaluator::set_motions(const MotionMap& motions) {
  for (const Segment& seg : scene_->segments) {
    Frame& f = frames_[static_cast<std::size_t>(seg.id)];
    f.motion = motion_for(motions, seg);
    const double rad = deg_to_rad(f.motion.theta_deg);
    f.cos_t = std::cos(rad);
    f.sin_t = std::sin(rad);
    f.world.resize(seg.samples.size());
    for (std::size_t i = 0; i < seg.samples.size(); ++i) f.world[i] = f.motion.apply(seg.samples[i]);
  }
}

Vec2 Evaluator::world(const PointRef& p) const {
  const Segment& seg = scene_->segments[static_cast<std::size_t>(p.segment)];
  return p.rest ? seg.samples[p.index] : frames_[static_cast<std::size_t>(p.segment)].world[p.index];
}

Vec2 Evaluator::local(const PointRef& p) const {
  const Segment& seg = scene_->segments[static_cast<std::size_t>(p.segment)];
  return seg.samples[p.index] - seg.pivot;
}

void Evaluator::add_point_grad(DiffScalar& out, int segment, Vec2 q, Vec2 coeff) const {
  const Frame& f = frames_[static_cast<std::size_t>(segment)];
  const auto& idx = f.slot_index;
  const double c = f.cos_t;
  const double s = f.sin_t;
  const double sx = f.motion.sx;
  const double sy = f.motion.sy;
  if (idx[0] >= 0) out.grad[static_cast<std::size_t>(idx[0])] += coeff.x;
  if (idx[1] >= 0) out.grad[static_cast<std::size_t>(idx[1])] += coeff.y;
  if (idx[2] >= 0) {
    const Vec2 d{-s * sx * q.x - c * sy * q.y, c * sx * q.x - s * sy * q.y};
    out.grad[static_cast<std::size_t>(idx[2])] += deg_to_rad(1.0) * dot(coeff, d);
  }
  if (idx[3] >= 0) out.grad[static_cast<std::size_t>(idx[3])] += dot(coeff, Vec2{c * q.x, s * q.x});
  if (idx[4] >= 0) out.grad[static_cast<std::size_t>(idx[4])] += dot(coeff, Vec2{-s * q.y, c * q.y});
}

void Evaluator::add_point_grad(DiffScalar& out, const PointRef& p, Vec2 coeff) const {
  if (p.rest) return;
  add_point_grad(out, p.segment, local(p), coeff);
}

std::vector<double> Evaluator::extremum_weights(std::span<const double> values, bool take_max) const {
  std::vector<double> w(values.size(), 0.0);
  if (values.empty()) return w;
  const double sign = take_max ? 1.0 : -1.0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (sign * values[i] > sign * values[best]) best = i;
  }
  if (cfg_.temperature <= 0) {
    w[best] = 1.0;
    return w;
  }
  double total = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    w[i] = std::exp(sign * (values[i] - values[best]) / cfg_.temperature);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

namespace {

// Hard extremum value, or the log-sum-exp value when smoothing.
double reduce(std::span<const double> values, bool take_max, double temperature) {
  double best = values[0];
  for (double v : values) best = take_max ? std::max(best, v) : std::min(best, v);
  if (temperature <= 0) return best;
  const double sign = take_max ? 1.0 : -1.0;
  double total = 0;
  for (double v : values) total += std::exp(sign * (v - best) / temperature);
  return best + sign * temperature * std::log(total);
}

}  // namespace

bool Evaluator::contains(Vec2 p, const SegValue& s) const {
  for (const auto& [id, rest] : s.shapes) {
    const Segment& seg = scene_->segments[static_cast<std::size_t>(id)];
    const std::vector<Vec2>& pts = rest ? seg.samples : frames_[static_cast<std::size_t>(id)].world;
    for (std::size_t k = 0; k < seg.paths.size(); ++k) {
      const auto loop = std::span<const Vec2>(pts).subspan(k * seg.samples_per_path, seg.samples_per_path);
      if (point_in_loop(p, loop)) return true;
    }
  }
  return false;
}

Evaluator::Nearest Evaluator::nearest_on_outline(Vec2 p, const SegValue& s) const {
  Nearest best;
  best.dist = std::numeric_limits<double>::infinity();
  double best2 = best.dist;
  for (const auto& [id, rest] : s.shapes) {
    const Segment& seg = scene_->segments[static_cast<std::size_t>(id)];
    const std::vector<Vec2>& pts = rest ? seg.samples : frames_[static_cast<std::size_t>(id)].world;
    const std::size_t n = static_cast<std::size_t>(seg.samples_per_path);
    for (std::size_t k = 0; k < seg.paths.size(); ++k) {
      const std::size_t base = k * n;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ia = base + i;
        const std::size_t ib = base + (i + 1) % n;
        const SegmentProjection proj = project_on_segment(p, pts[ia], pts[ib]);
        if (proj.dist2 < best2) {
          best2 = proj.dist2;
          best.closest = proj.point;
          best.t = proj.t;
          best.a = {id, static_cast<std::uint32_t>(ia), rest};
          best.b = {id, static_cast<std::uint32_t>(ib), rest};
        }
      }
    }
  }
  best.dist = std::sqrt(best2);
  return best;
}

BBox Evaluator::outline_bbox(const SegValue& s) const {
  const double inf = std::numeric_limits<double>::infinity();
  BBox box{inf, inf, -inf, -inf};
  for (const auto& [id, rest] : s.shapes) {
    const Segment& seg = scene_->segments[static_cast<std::size_t>(id)];
    const std::vector<Vec2>& pts = rest ? seg.samples : frames_[static_cast<std::size_t>(id)].world;
    for (const Vec2& q : pts) {
      box.min_x = std::min(box.min_x, q.x);
      box.min_y = std::min(box.min_y, q.y);
      box.max_x = std::max(box.max_x, q.x);
      box.max_y = std::max(box.max_y, q.y);
    }
  }
  return box;
}

double Evaluator::signed_distance(Vec2 p, const SegValue& s) const {
  const double d = nearest_on_outline(p, s).dist;
  return contains(p, s) ? -d : d;
}

void Evaluator::add_signed_distance_grad(DiffScalar& out, const PointRef& p, const Nearest& n, bool inside,
                                         double weight) const {
  if (n.dist <= 0) return;
  const double sign = inside ? -1.0 : 1.0;
  const Vec2 u = (world(p) - n.closest) / n.dist;  // d(dist)/d(p)
  add_point_grad(out, p, weight * sign * u);
  add_point_grad(out, n.a, -weight * sign * (1.0 - n.t) * u);
  add_point_grad(out, n.b, -weight * sign * n.t * u);
}

DiffScalar Evaluator::signed_gap(const SegValue& a, const SegValue& b) {
  const std::size_t n = a.samples.size();
  std::vector<Nearest> nearest(n);
  std::vector<bool> inside(n);
  std::vector<double> sd(n);
  std::vector<Vec2> pts(n);
  bool any_inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = world(a.samples[i]);
    inside[i] = contains(pts[i], b);
    any_inside = any_inside || inside[i];
  }
  if (cfg_.temperature > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = nearest_on_outline(pts[i], b);
      sd[i] = inside[i] ? -nearest[i].dist : nearest[i].dist;
    }
  } else {
    // Hard minimum: skip samples that provably cannot be the argmin.
    const double inf = std::numeric_limits<double>::infinity();
    const BBox box = outline_bbox(b);
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      sd[i] = inf;
      if (any_inside && !inside[i]) continue;
      const double dx = std::max({box.min_x - pts[i].x, 0.0, pts[i].x - box.max_x});
      const double dy = std::max({box.min_y - pts[i].y, 0.0, pts[i].y - box.max_y});
      order.push_back({any_inside ? 0.0 : std::hypot(dx, dy), i});
    }
    std::sort(order.begin(), order.end());
    double best = inf;
    for (const auto& [lb, i] : order) {
      if (!any_inside && lb > best) break;
      nearest[i] = nearest_on_outline(pts[i], b);
      sd[i] = inside[i] ? -nearest[i].dist : nearest[i].dist;
      best = std::min(best, sd[i]);
    }
  }
  DiffScalar out = constant(reduce(sd, false, cfg_.temperature));
  const std::vector<double> w = extremum_weights(sd, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] != 0) add_signed_distance_grad(out, a.samples[i], nearest[i], inside[i], w[i]);
  }
  return out;
}

DiffScalar Evaluator::inside_violation(const SegValue& a, const SegValue& b) {
  DiffScalar out = zero();
  const double inv = 1.0 / static_cast<double>(a.samples.size());
  for (const PointRef& p : a.samples) {
    const Vec2 w = world(p);
    if (contains(w, b)) continue;
    const Nearest n = nearest_on_outline(w, b);
    out.value += inv * n.dist;
    add_signed_distance_grad(out, p, n, false, inv);
  }
  return out;
}

DiffScalar Evaluator::coincide(int seg_a, Vec2 anchor_a, int seg_b, Vec2 anchor_b) {
  const Segment& sa = scene_->segment(seg_a);
  const Segment& sb = scene_->segment(seg_b);
  const Frame& fa = frames_[static_cast<std::size_t>(seg_a)];
  const Frame& fb = frames_[static_cast<std::size_t>(seg_b)];
  const Vec2 pa = fa.motion.apply(anchor_a);
  const Vec2 pb = fb.motion.apply(anchor_b);
  const double d = norm(pa - pb);
  DiffScalar out = constant(d);
  if (d > 0) {
    const Vec2 u = (pa - pb) / d;
    add_point_grad(out, seg_a, anchor_a - sa.pivot, u);
    add_point_grad(out, seg_b, anchor_b - sb.pivot, -u);
  }
  return out;
}

DiffScalar Evaluator::attribute(Op op, const SegValue& s) {
  if (s.samples.empty()) throw EvalError("empty region");
  const std::size_t n = s.samples.size();
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = world(s.samples[i]);

  const auto extremum = [&](bool use_x, bool take_max) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = use_x ? pts[i].x : pts[i].y;
    DiffScalar out = constant(reduce(v, take_max, cfg_.temperature));
    const std::vector<double> w = extremum_weights(v, take_max);
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] != 0) add_point_grad(out, s.samples[i], use_x ? Vec2{w[i], 0} : Vec2{0, w[i]});
    }
    return out;
  };
  const auto mean = [&](bool use_x) {
    DiffScalar out = zero();
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.value += inv * (use_x ? pts[i].x : pts[i].y);
      add_point_grad(out, s.samples[i], use_x ? Vec2{inv, 0} : Vec2{0, inv});
    }
    return out;
  };

  switch (op) {
    case Op::MinX: return extremum(true, false);
    case Op::MinY: return extremum(false, false);
    case Op::MaxX: return extremum(true, true);
    case Op::MaxY: return extremum(false, true);
    case Op::HoriLen: return extremum(true, true) - extremum(true, false);
    case Op::VertLen: return extremum(false, true) - extremum(false, false);
    case Op::CenterX: return mean(true);
    case Op::CenterY: return mean(false);
    case Op::LongDirX:
    case Op::LongDirY:
    case Op::ShortDirX:
    case Op::ShortDirY: {
      const Vec2 m = mean_point(pts);
      const double inv = 1.0 / static_cast<double>(n);
      double a = 0, b = 0, c = 0;
      for (const Vec2& p : pts) {
        a += inv * (p.x - m.x) * (p.x - m.x);
        b += inv * (p.x - m.x) * (p.y - m.y);
        c += inv * (p.y - m.y) * (p.y - m.y);
      }
      const double ux = a - c;
      const double uy = 2 * b;
      const double r2 = ux * ux + uy * uy;
      if (r2 < 1e-18) {
        spdlog::warn("direction of an isotropic point set is undefined; using (1, 0)");
        const bool one = op == Op::LongDirX || op == Op::ShortDirY;
        return constant(one ? 1.0 : 0.0);
      }
      const double phi = 0.5 * std::atan2(uy, ux);
      double value = 0;
      double dvalue_dphi = 0;
      switch (op) {
        case Op::LongDirX: value = std::cos(phi); dvalue_dphi = -std::sin(phi); break;
        case Op::LongDirY: value = std::sin(phi); dvalue_dphi = std::cos(phi); break;
        case Op::ShortDirX: value = -std::sin(phi); dvalue_dphi = -std::cos(phi); break;
        default: value = std::cos(phi); dvalue_dphi = -std::sin(phi); break;
      }
      // dphi = 0.5 * (ux * duy - uy * dux) / r2 with dux = da - dc, duy = 2 db.
      DiffScalar out = constant(value);
      const double k = dvalue_dphi * 0.5 / r2;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 d = pts[i] - m;
        // d(a)/dp = 2 inv (dx, 0), d(c)/dp = 2 inv (0, dy), d(b)/dp = inv (dy, dx)
        const Vec2 dux{2 * inv * d.x, -2 * inv * d.y};
        const Vec2 duy{2 * inv * d.y, 2 * inv * d.x};
        add_point_grad(out, s.samples[i], k * (ux * duy - uy * dux));
      }
      return out;
    }
    default:
      throw EvalError("not an attribute operator: " + std::string(dsl::op_info(op).name));
  }
}

DiffScalar Evaluator::relation_attribute(Op op, const SegValue& a, const SegValue& b) {
  if (a.samples.empty() || b.samples.empty()) throw EvalError("empty region");
  const auto centroid = [&](const SegValue& s) {
    DiffScalar x = zero();
    DiffScalar y = zero();
    const double inv = 1.0 / static_cast<double>(s.samples.size());
    for (const PointRef& p : s.samples) {
      const Vec2 w = world(p);
      x.value += inv * w.x;
      y.value += inv * w.y;
      add_point_grad(x, p, {inv, 0});
      add_point_grad(y, p, {0, inv});
    }
    return std::pair{x, y};
  };
  switch (op) {
    case Op::CenterDist:
    case Op::Angle: {
      const auto [ax, ay] = centroid(a);
      const auto [bx, by] = centroid(b);
      const DiffScalar dx = bx - ax;
      const DiffScalar dy = by - ay;
      if (op == Op::CenterDist) {
        const double d = std::hypot(dx.value, dy.value);
        DiffScalar out = constant(d);
        if (d > 0) out = dx * (dx.value / d) + dy * (dy.value / d);
        out.value = d;
        return out;
      }
      const double r2 = dx.value * dx.value + dy.value * dy.value;
      DiffScalar out = constant(rad_to_deg(std::atan2(dy.value, dx.value)));
      if (out.value == -180.0) out.value = 180.0;
      if (r2 > 0) {
        const double k = rad_to_deg(1.0) / r2;
        for (std::size_t i = 0; i < out.grad.size(); ++i) {
          out.grad[i] = k * (dx.value * dy.grad[i] - dy.value * dx.grad[i]);
        }
      }
      return out;
    }
    case Op::MinDist:
    case Op::MaxDist: {
      const bool take_max = op == Op::MaxDist;
      std::vector<double> d;
      d.reserve(a.samples.size() * b.samples.size());
      for (const PointRef& p : a.samples) {
        const Vec2 wp = world(p);
        for (const PointRef& q : b.samples) d.push_back(norm(wp - world(q)));
      }
      DiffScalar out = constant(reduce(d, take_max, cfg_.temperature));
      const std::vector<double> w = extremum_weights(d, take_max);
      for (std::size_t k = 0; k < d.size(); ++k) {
        if (w[k] == 0 || d[k] <= 0) continue;
        const PointRef& p = a.samples[k / b.samples.size()];
        const PointRef& q = b.samples[k % b.samples.size()];
        const Vec2 u = (world(p) - world(q)) / d[k];
        add_point_grad(out, p, w[k] * u);
        add_point_grad(out, q, -w[k] * u);
      }
      return out;
    }
    case Op::AvgDist: {
      DiffScalar out = zero();
      const double inv = 1.0 / static_cast<double>(a.samples.size());
      for (const PointRef& p : a.samples) {
        const Vec2 wp = world(p);
        double best = std::numeric_limits<double>::infinity();
        const PointRef* arg = nullptr;
        for (const PointRef& q : b.samples) {
          const double d2 = norm2(wp - world(q));
          if (d2 < best) {
            best = d2;
            arg = &q;
          }
        }
        const double d = std::sqrt(best);
        out.value += inv * d;
        if (d > 0) {
          const Vec2 u = (wp - world(*arg)) / d;
          add_point_grad(out, p, inv * u);
          add_point_grad(out, *arg, -inv * u);
        }
      }
      return out;
    }
    default:
      throw EvalError("not a relation attribute operator: " + std::string(dsl::op_info(op).name));
  }
}

SegValue Evaluator::region(Op side, const SegValue& s) {
  if (s.samples.empty()) throw EvalError("empty region");
  std::vector<Vec2> pts;
  for (const PointRef& p : s.samples) pts.push_back(world(p));
  const BBox box = bbox(pts);
  const double f = cfg_.band_fraction;
  SegValue out;
  out.shapes = s.shapes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = false;
    switch (side) {
      case Op::Top: keep = pts[i].y <= box.min_y + f * box.height(); break;
      case Op::Bot: keep = pts[i].y >= box.max_y - f * box.height(); break;
      case Op::Left: keep = pts[i].x <= box.min_x + f * box.width(); break;
      case Op::Right: keep = pts[i].x >= box.max_x - f * box.width(); break;
      default: throw EvalError("not a region operator");
    }
    if (keep) out.samples.push_back(s.samples[i]);
  }
  if (out.samples.empty()) {
    const int id = s.shapes.empty() ? -1 : s.shapes.front().first;
    throw EvalError(std::string(dsl::op_info(side).name) + " region of seg" + std::to_string(id) + " is empty");
  }
  return out;
}

SegValue Evaluator::setop(Op op, const std::vector<SegValue>& parts) {
  SegValue out;
  for (const SegValue& p : parts) out.shapes.insert(out.shapes.end(), p.shapes.begin(), p.shapes.end());
  if (op == Op::Union) {
    for (const SegValue& p : parts) out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    return out;
  }
  if (op != Op::Inter) throw EvalError("not a set operator");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (const PointRef& p : parts[i].samples) {
      const Vec2 w = world(p);
      bool all = true;
      for (std::size_t j = 0; j < parts.size() && all; ++j) {
        if (j == i) continue;
        // Boundary points count as inside, so inter(A, A) keeps A.
        all = contains(w, parts[j]) || nearest_on_outline(w, parts[j]).dist <= 1e-7;
      }
      if (all) out.samples.push_back(p);
    }
  }
  if (out.samples.empty()) throw EvalError("empty intersection region");
  return out;
}

SegValue Evaluator::eval_segment(const Node& node, bool rest) {
  switch (node.op) {
    case Op::SegRef: {
      const Segment& seg = scene_->segment(node.segment);
      SegValue out;
      out.samples.reserve(seg.samples.size());
      for (std::size_t i = 0; i < seg.samples.size(); ++i) {
        out.samples.push_back({seg.id, static_cast<std::uint32_t>(i), rest});
      }
      out.shapes.push_back({seg.id, rest});
      return out;
    }
    case Op::Old:
      return eval_segment(node.children.at(0), true);
    case Op::Union:
    case Op::Inter:
    case Op::Top:
    case Op::Bot:
    case Op::Left:
    case Op::Right: {
      const auto key = std::pair{&node, rest};
      if (const auto it = membership_.find(key); it != membership_.end()) return it->second;
      SegValue value;
      if (node.op == Op::Union || node.op == Op::Inter) {
        std::vector<SegValue> parts;
        for (const Node& c : node.children) parts.push_back(eval_segment(c, rest));
        value = setop(node.op, parts);
      } else {
        value = region(node.op, eval_segment(node.children.at(0), rest));
      }
      membership_.emplace(key, value);
      return value;
    }
    default:
      throw EvalError("expected a segment-valued expression, got " + std::string(dsl::op_info(node.op).name));
  }
}

DiffScalar Evaluator::eval(const Node& node) {
  const auto seg = [&](std::size_t i) { return eval_segment(node.children.at(i)); };
  const auto num = [&](std::size_t i) { return eval(node.children.at(i)); };
  switch (node.op) {
    case Op::Number: return constant(node.number);
    case Op::Equal: return abs(num(0) - num(1));
    case Op::Smaller: return relu(num(0) - num(1));
    case Op::Larger: return relu(num(1) - num(0));
    case Op::Plus: return num(0) + num(1);
    case Op::Minus: return num(0) - num(1);
    case Op::Mul: return num(0) * num(1);
    case Op::Div: return num(0) / num(1);
    case Op::Min: return min(num(0), num(1));
    case Op::Max: return max(num(0), num(1));
    case Op::Touch: return abs(signed_gap(seg(0), seg(1)));
    case Op::Overlap: {
      DiffScalar g = signed_gap(seg(0), seg(1));
      g.value += cfg_.overlap_depth;
      return relu(g);
    }
    case Op::Detach: {
      DiffScalar g = signed_gap(seg(0), seg(1)) * -1.0;
      g.value += cfg_.detach_gap;
      return relu(g);
    }
    case Op::Inside: return inside_violation(seg(0), seg(1));
    case Op::OnTop: return relu(attribute(Op::MaxY, seg(0)) - attribute(Op::MinY, seg(1)));
    case Op::OnBottom: return relu(attribute(Op::MaxY, seg(1)) - attribute(Op::MinY, seg(0)));
    case Op::OnLeft: return relu(attribute(Op::MaxX, seg(0)) - attribute(Op::MinX, seg(1)));
    case Op::OnRight: return relu(attribute(Op::MaxX, seg(1)) - attribute(Op::MinX, seg(0)));
    case Op::CoincideOnPoint: {
      const Node& a = node.children.at(0);
      const Node& b = node.children.at(2);
      if (a.op != Op::SegRef || b.op != Op::SegRef) {
        throw EvalError("coincide_on_point anchors must refer to plain segment references");
      }
      return coincide(a.segment, node.children.at(1).point, b.segment, node.children.at(3).point);
    }
    case Op::VertLen:
    case Op::HoriLen:
    case Op::CenterX:
    case Op::CenterY:
    case Op::LongDirX:
    case Op::LongDirY:
    case Op::ShortDirX:
    case Op::ShortDirY:
    case Op::MinX:
    case Op::MinY:
    case Op::MaxX:
    case Op::MaxY:
      return attribute(node.op, seg(0));
    case Op::AvgDist:
    case Op::MinDist:
    case Op::MaxDist:
    case Op::Angle:
    case Op::CenterDist:
      return relation_attribute(node.op, seg(0), seg(1));
    default:
      throw EvalError("expected a number-valued expression, got " + std::string(dsl::op_info(node.op).name));
  }
}

DiffScalar Evaluator::total_loss(std::span<const Node> constraints) {
  if (constraints.empty()) throw EvalError("total_loss needs at least one constraint");
  DiffScalar sum = zero();
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const DiffScalar v = eval(constraints[i]);
    if (!std::isfinite(v.value)) {
      throw EvalError("constraint " + std::to_string(i + 1) + " (" + dsl::serialize(constraints[i]) +
                      ") produced a non-finite value");
    }
    sum += v;
  }
  sum *= 1.0 / static_cast<double>(constraints.size());
  return sum;
}

DiffScalar eval_tree(const Node& tree, const EvalContext& ctx, const EvalConfig& cfg) {
  Evaluator ev(*ctx.scene, ctx.params, cfg);
  ev.set_motions(ctx.motions);
  return ev.eval(tree);
}

DiffScalar total_loss(std::span<const Node> constraints, const EvalContext& ctx, const EvalConfig& cfg) {
  Evaluator ev(*ctx.scene, ctx.params, cfg);
  ev.set_motions(ctx.motions);
  return ev.total_loss(constraints);
}

}  // namespace iconforge
