#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iconforge/geometry.hpp"

namespace iconforge {

struct Scene;

namespace dsl {

/// Canonical operator inventory.
enum class Op {
  // value constraint specifiers
  Equal, Smaller, Larger,
  // derived value constraint specifiers
  CoincideOnPoint, Inside, Touch, Overlap, Detach, OnTop, OnBottom, OnLeft, OnRight,
  // arithmetic
  Plus, Minus, Mul, Div, Min, Max,
  // segment -> value
  VertLen, HoriLen, CenterX, CenterY, LongDirX, LongDirY, ShortDirX, ShortDirY,
  MinX, MinY, MaxX, MaxY,
  // segment -> segment
  Old, Top, Bot, Left, Right,
  // segments -> segment
  Union, Inter,
  // segments -> value
  AvgDist, MinDist, MaxDist, Angle, CenterDist,
  // leaves
  Number, SegRef, Point,
};

enum class MotionKind { Translate, Rotate, Scale, Stay, Adjust };

/// Result sort of a node.
enum class Sort { Violation, Number, Segment, Point };

struct Node {
  Op op = Op::Number;
  double number = 0.0;  // Op::Number
  int segment = -1;     // Op::SegRef
  Vec2 point;           // Op::Point
  std::vector<Node> children;

  friend bool operator==(const Node&, const Node&) = default;
};

struct MotionSpec {
  int target = -1;
  MotionKind kind = MotionKind::Translate;
  friend bool operator==(const MotionSpec&, const MotionSpec&) = default;
};

struct ConstraintProgram {
  std::vector<MotionSpec> motions;
  std::vector<Node> constraints;
  friend bool operator==(const ConstraintProgram&, const ConstraintProgram&) = default;
};

struct OpInfo {
  Op op;
  std::string_view name;
  Sort result;
  std::vector<Sort> args;  // for variadic operators: the repeated sort
  bool variadic = false;
};

const OpInfo& op_info(Op op);
/// Every canonical operator name (specifiers, compute operators, motion
/// specifiers), in inventory order.
std::vector<std::string_view> operator_names();
std::string_view motion_name(MotionKind kind);

/// Canonical name for a surface identifier (aliases resolved), or nullopt.
std::optional<std::string> canonical_name(std::string_view identifier);

/// Parses DSL text. With a scene, segK references are bound against it and
/// unresolved references are rejected.
ConstraintProgram parse(std::string_view source, const Scene* scene = nullptr);
inline ConstraintProgram parse(std::string_view source, const Scene& scene) {
  return parse(source, &scene);
}

/// Canonical text: functional arithmetic, canonical names, one statement per
/// line, motion specifiers first.
std::string serialize(const ConstraintProgram& program);
std::string serialize(const Node& node);

/// Type-checks one tree; throws ParseError on arity/sort violations.
void check(const Node& node);

Node make_number(double v);
Node make_segref(int id);
Node make_point(Vec2 p);
Node make(Op op, std::vector<Node> children);

/// Segment ids referenced anywhere under the node (sorted, unique).
std::vector<int> referenced_segments(const Node& node);

struct ValidationReport {
  std::vector<int> referenced;     // by constraints or motion specifiers
  std::vector<int> movable;        // targets of non-stay motion specifiers
  std::size_t constraint_count = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
  std::string text() const;
};

ValidationReport validate(const ConstraintProgram& program, const Scene& scene);

}  // namespace dsl
}  // namespace iconforge
