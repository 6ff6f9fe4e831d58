#include <doctest.h>

#include "evalkit.hpp"
#include "iconforge/errors.hpp"
#include "shapes.hpp"

using namespace iconforge;
using namespace iconforge::testing;

namespace {

Scene two_squares(double gap_x) {
  return make_scene({{"a", "a", rect(0, 0, 10, 10)}, {"b", "b", rect(gap_x, 0, gap_x + 10, 10)}});
}

double value(const Scene& s, const std::string& text, const MotionMap& m = {}) {
  return eval_at(s, text, m, {}).value;
}

}  // namespace

TEST_CASE("attribute values") {
  const Scene s = two_squares(20);
  CHECK(value(s, "equal(hori_len(seg0), 10)") == doctest::Approx(0));
  CHECK(value(s, "equal(vert_len(seg0), 0)") == doctest::Approx(10));
  CHECK(value(s, "equal(center_x(seg0), 0)") == doctest::Approx(5));
  CHECK(value(s, "equal(hori_len(union(seg0, seg1)), 0)") == doctest::Approx(30));
  CHECK(value(s, "equal(min_dist(seg0, seg1), 0)") == doctest::Approx(10));
  CHECK(value(s, "equal(center_dist(seg0, seg1), 0)") == doctest::Approx(20));
}

TEST_CASE("hori_len gradient with respect to sx") {
  const Scene s = two_squares(20);
  const auto d = eval_at(s, "equal(hori_len(seg0), 5)", {}, {{0, Slot::Sx}});
  CHECK(d.value == doctest::Approx(5));
  CHECK(d.grad[0] == doctest::Approx(10));
}

TEST_CASE("touch and signed gap") {
  const Scene s = two_squares(20);
  const auto d = eval_at(s, "touch(seg0, seg1)", {}, {{0, Slot::Tx}});
  CHECK(d.value == doctest::Approx(10));
  CHECK(d.grad[0] == doctest::Approx(-1));

  const Scene o = two_squares(5);
  Evaluator ev(o, {});
  const auto a = ev.eval_segment(dsl::make_segref(0));
  const auto b = ev.eval_segment(dsl::make_segref(1));
  CHECK(ev.signed_gap(a, b).value == doctest::Approx(-5));
  CHECK(value(o, "touch(seg0, seg1)") == doctest::Approx(5));
}

TEST_CASE("signed gap of coincident squares matches a brute-force oracle") {
  const Scene s = two_squares(0);
  Evaluator ev(s, {});
  const auto a = ev.eval_segment(dsl::make_segref(0));
  const auto b = ev.eval_segment(dsl::make_segref(1));
  // Every boundary sample of A lies on B's outline, so the minimum signed
  // distance is zero.
  double oracle = 1e300;
  const auto& sa = s.segment(0).samples;
  const auto& sb = s.segment(1).samples;
  for (const Vec2& p : sa) {
    double best = 1e300;
    for (std::size_t j = 0; j < sb.size(); ++j) {
      best = std::min(best, std::sqrt(project_on_segment(p, sb[j], sb[(j + 1) % sb.size()]).dist2));
    }
    oracle = std::min(oracle, point_in_loop(p, s.segment(1).paths[0]) ? -best : best);
  }
  CHECK(ev.signed_gap(a, b).value == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(oracle) < 1e-9);
}

TEST_CASE("specifier semantics") {
  const Scene stacked = make_scene({{"a", "a", rect(0, 0, 10, 10)}, {"b", "b", rect(0, 20, 10, 30)}});
  CHECK(value(stacked, "on_top(seg0, seg1)") == 0);
  CHECK(value(stacked, "on_bottom(seg0, seg1)") == doctest::Approx(30));
  const Scene touching = two_squares(10);
  CHECK(value(touching, "detach(seg0, seg1)") == doctest::Approx(2));
  CHECK(value(touching, "touch(seg0, seg1)") == doctest::Approx(0).epsilon(1e-12));
  const Scene nested = make_scene({{"a", "a", rect(2, 2, 8, 8)}, {"b", "b", rect(0, 0, 10, 10)}});
  CHECK(value(nested, "inside(seg0, seg1)") == 0);
  CHECK(value(nested, "inside(seg1, seg0)") > 0);
  CHECK(value(nested, "equal(hori_len(seg0), hori_len(seg0))") == 0);
  CHECK(value(nested, "smaller(hori_len(seg0), hori_len(seg1))") == 0);
  CHECK(value(nested, "larger(hori_len(seg0), hori_len(seg1))") == doctest::Approx(4));
}

TEST_CASE("angle uses centroid to centroid in degrees") {
  const Scene s = make_scene({{"a", "a", rect(-5, -5, 5, 5)}, {"b", "b", rect(5, 5, 15, 15)}});
  CHECK(value(s, "equal(angle(seg0, seg1), 0)") == doctest::Approx(45));
}

namespace {

// Principal axis of the sample covariance by power iteration, sign fixed to
// nonnegative x.
Vec2 principal_axis(const std::vector<Vec2>& pts) {
  const Vec2 m = mean_point(pts);
  double a = 0, b = 0, c = 0;
  for (const Vec2& p : pts) {
    a += (p.x - m.x) * (p.x - m.x);
    b += (p.x - m.x) * (p.y - m.y);
    c += (p.y - m.y) * (p.y - m.y);
  }
  Vec2 v{1, 0.3};
  for (int i = 0; i < 500; ++i) {
    v = Vec2{a * v.x + b * v.y, b * v.x + c * v.y};
    v = v / norm(v);
  }
  return v.x < 0 ? Vec2{-v.x, -v.y} : v;
}

}  // namespace

TEST_CASE("long direction of a wide rectangle") {
  const Scene s = make_scene({{"a", "a", rect(0, 0, 20, 4)}});
  const Vec2 axis = principal_axis(s.segment(0).samples);
  CHECK(axis.x == doctest::Approx(1).epsilon(1e-3));
  CHECK(value(s, "equal(long_dir_x(seg0), 0)") == doctest::Approx(axis.x).epsilon(1e-9));
  CHECK(value(s, "equal(long_dir_y(seg0), -1)") == doctest::Approx(1 + axis.y).epsilon(1e-9));
  CHECK(value(s, "equal(short_dir_y(seg0), 0)") == doctest::Approx(axis.x).epsilon(1e-9));
  MotionMap m{{0, identity_motion(s.segment(0))}};
  m[0].theta_deg = 30;
  const Vec2 rotated = principal_axis(apply_motion(s.segment(0).samples, m[0]));
  CHECK(rotated.y == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(value(s, "equal(long_dir_y(seg0), -1)", m) == doctest::Approx(1 + rotated.y).epsilon(1e-9));
}

TEST_CASE("regions and set operators") {
  const Scene s = two_squares(20);
  Evaluator ev(s, {});
  const auto top = ev.eval_segment(dsl::parse("equal(min_x(top(seg0)), 0)").constraints[0].children[0].children[0]);
  for (const PointRef& p : top.samples) CHECK(ev.world(p).y <= 2.5);
  CHECK_FALSE(top.samples.empty());
  const Scene wide = make_scene({{"a", "a", rect(0, 0, 20, 4)}});
  Evaluator ew(wide, {});
  const auto right = ew.eval_segment(dsl::parse("equal(min_x(right(seg0)), 0)").constraints[0].children[0].children[0]);
  for (const PointRef& p : right.samples) CHECK(ew.world(p).x >= 15);
  // inter(A, A) keeps all of A
  const auto same = ev.eval_segment(dsl::parse("equal(min_x(inter(seg0, seg0)), 0)").constraints[0].children[0].children[0]);
  CHECK(same.samples.size() == 2 * s.segment(0).samples.size());
  CHECK_THROWS_WITH_AS(value(s, "equal(min_x(inter(seg0, seg1)), 0)"), "empty intersection region", EvalError);
}

TEST_CASE("old ignores motion and has no gradient") {
  const Scene s = two_squares(20);
  MotionMap m{{0, identity_motion(s.segment(0))}};
  m[0].sx = 3;
  m[0].tx = 7;
  const auto d = eval_at(s, "equal(hori_len(old(seg0)), 4)", m, all_params({0}));
  CHECK(d.value == doctest::Approx(6));
  for (double g : d.grad) CHECK(g == 0);
}

TEST_CASE("coincide is zero at matching anchors") {
  const Scene s = two_squares(5);
  CHECK(value(s, "coincide_on_point(seg0, [7.5, 5], seg1, [7.5, 5])") == 0);
  MotionMap m{{1, identity_motion(s.segment(1))}};
  m[1].ty = 3;
  CHECK(value(s, "coincide_on_point(seg0, [7.5, 5], seg1, [7.5, 5])", m) == doctest::Approx(3));
}

TEST_CASE("total loss is the mean") {
  const Scene s = two_squares(20);
  Evaluator ev(s, {});
  const auto prog = dsl::parse("equal(hori_len(seg0), 14)\nequal(hori_len(seg0), 10)");
  CHECK(ev.total_loss(prog.constraints).value == doctest::Approx(2));
  const auto one = dsl::parse("equal(hori_len(seg0), 14)");
  CHECK(ev.total_loss(one.constraints).value == doctest::Approx(4));
}

TEST_CASE("translation equivariance of relation attributes") {
  const Scene s = make_scene({{"a", "a", disk(100, 100, 20)}, {"b", "b", rect(150, 80, 190, 140)}});
  MotionMap m;
  for (int i : {0, 1}) {
    m[i] = identity_motion(s.segment(i));
    m[i].tx = 13.25;
    m[i].ty = -7.5;
  }
  for (const char* op : {"avg_dist", "min_dist", "max_dist", "angle", "center_dist"}) {
    const std::string text = std::string("equal(") + op + "(seg0, seg1), -1000)";
    CHECK(value(s, text, m) == doctest::Approx(value(s, text)).epsilon(1e-9));
  }
}
