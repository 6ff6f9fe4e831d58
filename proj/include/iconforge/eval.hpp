#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "iconforge/dsl.hpp"
#include "iconforge/scene.hpp"

namespace iconforge {

/// Motion parameter slots. The gradient is taken with respect to tx, ty
/// (pixels), theta (degrees), sx and sy (linear scale).
enum class Slot : std::uint8_t { Tx = 0, Ty = 1, Theta = 2, Sx = 3, Sy = 4 };
inline constexpr int kSlotCount = 5;

struct ParamRef {
  int segment = 0;
  Slot slot = Slot::Tx;
  friend bool operator==(ParamRef, ParamRef) = default;
};

/// Value plus dense gradient aligned with an active parameter index.
struct DiffScalar {
  double value = 0.0;
  std::vector<double> grad;

  DiffScalar() = default;
  DiffScalar(double v, std::size_t n) : value(v), grad(n, 0.0) {}

  DiffScalar& operator+=(const DiffScalar& o);
  DiffScalar& operator-=(const DiffScalar& o);
  DiffScalar& operator*=(double s);
};

DiffScalar operator+(DiffScalar a, const DiffScalar& b);
DiffScalar operator-(DiffScalar a, const DiffScalar& b);
DiffScalar operator*(const DiffScalar& a, const DiffScalar& b);
DiffScalar operator/(const DiffScalar& a, const DiffScalar& b);
DiffScalar operator*(DiffScalar a, double s);
DiffScalar abs(DiffScalar a);
DiffScalar relu(DiffScalar a);
DiffScalar min(const DiffScalar& a, const DiffScalar& b);
DiffScalar max(const DiffScalar& a, const DiffScalar& b);

struct EvalConfig {
  /// Fraction of the bbox extent kept by top/bot/left/right.
  double band_fraction = 0.25;
  /// Required penetration depth for overlap() and clearance for detach(), px.
  double overlap_depth = 2.0;
  double detach_gap = 2.0;
  /// Log-sum-exp temperature for min/max reductions; 0 uses hard extrema.
  double temperature = 0.0;
};

/// Scene plus current motions plus the ordered active parameter index.
/// Segments absent from the index are treated as pinned.
struct EvalContext {
  const Scene* scene = nullptr;
  MotionMap motions;
  std::vector<ParamRef> params;
};

/// A sample of a segment (rest == true ignores the segment's motion).
struct PointRef {
  int segment = 0;
  std::uint32_t index = 0;
  bool rest = false;
};

/// Segment-valued expression result: points plus the outlines that define
/// its inside (for derived sets, the outlines of the underlying segments).
struct SegValue {
  std::vector<PointRef> samples;
  std::vector<std::pair<int, bool>> shapes;  // (segment id, rest)
};

/// Evaluates constraint trees against one scene. Derived point-set
/// membership (regions, intersections) is computed on first use and then
/// held fixed until reset_membership(), so a Solve sees a piecewise smooth
/// loss.
class Evaluator {
 public:
  Evaluator(const Scene& scene, std::vector<ParamRef> params, EvalConfig cfg = {});

  void set_motions(const MotionMap& motions);
  void reset_membership() { membership_.clear(); }

  std::size_t param_count() const { return params_.size(); }
  const std::vector<ParamRef>& params() const { return params_; }
  const EvalConfig& config() const { return cfg_; }
  const Scene& scene() const { return *scene_; }

  /// Number- or violation-valued node.
  DiffScalar eval(const dsl::Node& node);
  SegValue eval_segment(const dsl::Node& node, bool rest = false);
  DiffScalar total_loss(std::span<const dsl::Node> constraints);

  DiffScalar signed_gap(const SegValue& a, const SegValue& b);
  DiffScalar attribute(dsl::Op op, const SegValue& s);
  DiffScalar relation_attribute(dsl::Op op, const SegValue& a, const SegValue& b);
  /// inside(): mean over a's samples of relu(signed distance to b).
  DiffScalar inside_violation(const SegValue& a, const SegValue& b);
  DiffScalar coincide(int seg_a, Vec2 anchor_a, int seg_b, Vec2 anchor_b);
  SegValue region(dsl::Op side, const SegValue& s);
  SegValue setop(dsl::Op op, const std::vector<SegValue>& parts);

  Vec2 world(const PointRef& p) const;
  /// Signed distance from a world point to the outline of s (negative inside).
  double signed_distance(Vec2 p, const SegValue& s) const;
  bool contains(Vec2 p, const SegValue& s) const;

 private:
  struct Frame {
    MotionParams motion;
    double cos_t = 1.0;
    double sin_t = 0.0;
    std::vector<Vec2> world;
    std::array<int, kSlotCount> slot_index{-1, -1, -1, -1, -1};
  };

  struct Nearest {
    double dist = 0;
    Vec2 closest;
    PointRef a, b;
    double t = 0;
  };

  DiffScalar zero() const { return DiffScalar(0.0, params_.size()); }
  DiffScalar constant(double v) const { return DiffScalar(v, params_.size()); }
  /// grad += coeff . d(world point)/d(params) for a point with rest-frame
  /// offset `local` from the pivot of `segment`.
  void add_point_grad(DiffScalar& out, int segment, Vec2 local, Vec2 coeff) const;
  void add_point_grad(DiffScalar& out, const PointRef& p, Vec2 coeff) const;
  Vec2 local(const PointRef& p) const;
  Nearest nearest_on_outline(Vec2 p, const SegValue& s) const;
  BBox outline_bbox(const SegValue& s) const;
  void add_signed_distance_grad(DiffScalar& out, const PointRef& p, const Nearest& n, bool inside,
                                double weight) const;
  /// Reduction helper: hard or soft extremum over per-item values.
  std::vector<double> extremum_weights(std::span<const double> values, bool take_max) const;

  const Scene* scene_;
  std::vector<ParamRef> params_;
  EvalConfig cfg_;
  std::vector<Frame> frames_;
  std::map<std::pair<const dsl::Node*, bool>, SegValue> membership_;
};

DiffScalar eval_tree(const dsl::Node& tree, const EvalContext& ctx, const EvalConfig& cfg = {});
DiffScalar total_loss(std::span<const dsl::Node> constraints, const EvalContext& ctx,
                      const EvalConfig& cfg = {});

}  // namespace iconforge
