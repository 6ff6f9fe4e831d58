#include <doctest.h>

#include "iconforge/dsl.hpp"
#include "iconforge/errors.hpp"
#include "reference_programs.hpp"
#include "shapes.hpp"

using namespace iconforge;
using namespace iconforge::dsl;
using namespace iconforge::testing;

TEST_CASE("reference programs parse and round-trip") {
  for (const char* text : kReferencePrograms) {
    CAPTURE(text);
    const ConstraintProgram p = parse(text);
    CHECK_FALSE(p.constraints.empty());
    const std::string canon = serialize(p);
    const ConstraintProgram q = parse(canon);
    CHECK(q == p);
    CHECK(serialize(q) == canon);
  }
}

TEST_CASE("aliases resolve to canonical operators") {
  const auto p = parse(kReferencePrograms[0]);
  REQUIRE(p.motions.size() == 2);
  CHECK(p.motions[0].kind == MotionKind::Rotate);
  const Node& eq = p.constraints.at(0);
  CHECK(eq.op == Op::Equal);
  CHECK(eq.children[0].op == Op::CenterDist);
  CHECK(eq.children[0].children[0].op == Op::Top);
  CHECK(eq.children[1].op == Op::Mul);
  CHECK(eq.children[1].children[1].children[0].op == Op::Union);
  CHECK(eq.children[1].children[1].children[0].children.size() == 4);
  CHECK(parse("move(seg1)").motions[0].kind == MotionKind::Translate);
  CHECK(canonical_name("old_copy") == "old");
  CHECK(canonical_name("nonsense") == std::nullopt);
}

TEST_CASE("arithmetic precedence and unary minus") {
  const auto p = parse("equal(min_x(seg0), 1 + 2 * 3 - -4)");
  const Node& rhs = p.constraints[0].children[1];
  CHECK(rhs.op == Op::Minus);
  CHECK(rhs.children[0].op == Op::Plus);
  CHECK(rhs.children[0].children[1].op == Op::Mul);
  CHECK(rhs.children[1].number == -4);
  CHECK(serialize(p.constraints[0]) == "equal(min_x(seg0), minus(plus(1, mul(2, 3)), -4))");
}

TEST_CASE("comments, blank lines and point literals") {
  const auto p = parse("# move the lid\n\nmove(seg0)\n"
                       "coincide_on_point(seg0, [1.5, 2], seg1, [3, 4])  # anchor\n");
  REQUIRE(p.constraints.size() == 1);
  CHECK(p.constraints[0].children[1].point.x == 1.5);
  CHECK(parse(serialize(p)) == p);
}

TEST_CASE("syntax errors carry positions and useful text") {
  CHECK_THROWS_WITH_AS(parse("touch(seg0)"), doctest::Contains("touch expects 2 segment arguments, got 1"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse("move(seg0)\nequal(horizontal_lenght(seg0), 3)"),
                       doctest::Contains("did you mean 'horizontal_length'"), ParseError);
  CHECK_THROWS_WITH_AS(parse("move(seg0)\nequal(horizontal_lenght(seg0), 3)"), doctest::Contains("line 2:"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse("equal(hori_len(seg0), 50%)"), doctest::Contains("percentages"), ParseError);
  CHECK_THROWS_AS(parse("equal(seg0, 3)"), ParseError);
  CHECK_THROWS_AS(parse("hori_len(seg0)"), ParseError);
  CHECK_THROWS_AS(parse("touch(seg0, seg1"), ParseError);
}

TEST_CASE("segment references are bound against a scene") {
  const Scene s = make_scene({{"a", "b", rect(0, 0, 10, 10)}, {"a", "c", rect(20, 0, 30, 10)}});
  CHECK_NOTHROW(parse("touch(seg0, seg1)", s));
  CHECK_THROWS_WITH_AS(parse("touch(seg0, seg7)", s),
                       doctest::Contains("unresolved segment reference seg7 (scene has 2 segments)"), ParseError);
}

TEST_CASE("validation report") {
  const Scene s = make_scene({{"a", "b", rect(0, 0, 10, 10)}, {"a", "c", rect(20, 0, 30, 10)}});
  const auto r = validate(parse("move(seg0), touch(seg0, seg1)"), s);
  CHECK(r.ok());
  CHECK(r.referenced == std::vector<int>{0, 1});
  CHECK(r.movable == std::vector<int>{0});
  CHECK(r.constraint_count == 1);
  const auto w = validate(parse("stay(seg1), equal(hori_len(seg1), 4)"), s);
  CHECK(w.ok());
  REQUIRE(w.warnings.size() == 1);
  CHECK(w.warnings[0].find("stay") != std::string::npos);
  const auto e = validate(parse("touch(seg0, seg5)"), s);
  CHECK_FALSE(e.ok());
}

TEST_CASE("inventory covers every canonical operator") {
  const auto names = operator_names();
  for (const char* n : {"equal", "smaller", "larger", "coincide_on_point", "inside", "touch", "overlap", "detach",
                        "on_top", "on_bottom", "on_left", "on_right", "plus", "minus", "mul", "div", "min", "max",
                        "vert_len", "hori_len", "center_x", "center_y", "long_dir_x", "long_dir_y", "short_dir_x",
                        "short_dir_y", "min_x", "min_y", "max_x", "max_y", "old", "top", "bot", "left", "right",
                        "union", "inter", "avg_dist", "min_dist", "max_dist", "angle", "translate", "rotate",
                        "scale", "stay", "adjust"}) {
    CAPTURE(n);
    CHECK(std::find(names.begin(), names.end(), std::string_view(n)) != names.end());
  }
}
