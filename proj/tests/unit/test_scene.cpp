#include <doctest.h>

#include <random>

#include "iconforge/errors.hpp"
#include "iconforge/scene.hpp"
#include "shapes.hpp"

using namespace iconforge;
using namespace iconforge::testing;

TEST_CASE("scene json parses and dumps") {
  const char* doc = R"({"width": 128, "height": 96, "segments": [
    {"id": 1, "label": "lamp:base", "color": [10, 20, 30], "paths": [[[10,10],[40,10],[40,30],[10,30]]]},
    {"id": 0, "label": {"object": "lamp", "part": "shade"}, "z": 2, "paths": [[[50,50],[70,50],[60,70]]]}
  ]})";
  const Scene s = parse_scene(doc);
  REQUIRE(s.segments.size() == 2);
  CHECK(s.width == 128);
  CHECK(s.segment(1).label.part == "base");
  CHECK(s.segment(0).z_hint == 2);
  CHECK(s.segment(0).samples.size() == 64);
  const Scene again = parse_scene(dump_scene(s));
  CHECK(again.segment(1).paths == s.segment(1).paths);
  CHECK(again.segment(1).color == Rgb{10, 20, 30});
}

TEST_CASE("scene errors name the problem") {
  CHECK_THROWS_WITH_AS(parse_scene(R"({"segments": [
    {"id": 0, "label": "a:b", "paths": [[[0,0],[10,0],[10,10]]]},
    {"id": 0, "label": "a:c", "paths": [[[0,0],[10,0],[10,10]]]}]})"),
                       doctest::Contains("duplicate segment id 0"), ParseError);
  CHECK_THROWS_WITH_AS(parse_scene(R"({"segments": [
    {"id": 0, "label": "a:b", "paths": [[[0,0],[10,0]]]}]})"),
                       doctest::Contains("open or degenerate path"), GeometryError);
  CHECK_THROWS_WITH_AS(parse_scene(R"({"segments": [
    {"id": 0, "label": "a:b", "paths": [[[0,0],[30,10],[30,0],[0,20]]]}]})"),
                       doctest::Contains("self-intersecting"), GeometryError);
  CHECK_THROWS_WITH_AS(parse_scene("{\"segments\": [\n{\"id\": 0,,}]}"), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("identity motion returns points unchanged") {
  const Scene s = make_scene({{"a", "b", disk(100.3, 200.7, 33.3)}});
  const auto m = identity_motion(s.segment(0));
  const auto out = apply_motion(s.segment(0).samples, m);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].x == s.segment(0).samples[i].x);
    CHECK(out[i].y == s.segment(0).samples[i].y);
  }
}

TEST_CASE("motion follows translate-rotate-scale about the pivot") {
  MotionParams m;
  m.pivot = {10, 10};
  m.tx = 5;
  m.theta_deg = 90;
  m.sx = 2;
  const Vec2 p = m.apply({11, 10});
  // (1, 0) -> scaled (2, 0) -> rotated (0, 2) in y-down coordinates
  CHECK(p.x == doctest::Approx(15));
  CHECK(p.y == doctest::Approx(12));
}

TEST_CASE("pivot is the sample centroid") {
  const Scene s = make_scene({{"a", "b", rect(10, 20, 30, 60)}});
  CHECK(s.segment(0).pivot.x == doctest::Approx(20));
  CHECK(s.segment(0).pivot.y == doctest::Approx(40));
}

namespace {

// Fraction of `rays` rays from p that hit the polygon, computed exactly:
// a ray hits when it crosses any edge.
double exact_ray_fraction(Vec2 p, const Path& poly, int rays) {
  int hits = 0;
  for (int k = 0; k < rays; ++k) {
    const double a = 2 * std::numbers::pi * k / rays;
    const Vec2 d{std::cos(a), std::sin(a)};
    bool hit = false;
    for (std::size_t i = 0; i < poly.size() && !hit; ++i) {
      const Vec2 e0 = poly[i];
      const Vec2 e1 = poly[(i + 1) % poly.size()];
      const Vec2 e = e1 - e0;
      const double den = cross(d, e);
      if (std::abs(den) < 1e-12) continue;
      const double t = cross(e0 - p, e) / den;
      const double u = cross(e0 - p, d) / den;
      hit = t > 0 && u >= 0 && u <= 1;
    }
    hits += hit;
  }
  return static_cast<double>(hits) / rays;
}

}  // namespace

TEST_CASE("proxy samples of a C shape fill the hollow") {
  // C opening to the right: a 100x100 square with a deep 80x20 bite.
  const Path c{{100, 100}, {200, 100}, {200, 140}, {120, 140}, {120, 160}, {200, 160}, {200, 200}, {100, 200}};
  const Scene s = make_scene({{"cup", "handle", c}});
  const auto& proxy = s.segment(0).proxy_samples;
  REQUIRE_FALSE(proxy.empty());
  int checked = 0;
  for (int y = 100; y < 200; y += 4) {
    for (int x = 100; x < 200; x += 4) {
      const Vec2 p{x + 0.5, y + 0.5};
      const double f = exact_ray_fraction(p, c, 360);
      if (f > 0.8 && f < 0.97) continue;  // too close to the ratio to judge
      bool in_proxy = false;
      for (const Vec2& q : proxy) in_proxy = in_proxy || (q.x == p.x && q.y == p.y);
      CHECK_MESSAGE(in_proxy == (f >= 0.97), "at ", x, ",", y, " fraction ", f);
      ++checked;
    }
  }
  CHECK(checked > 300);
  // a point deep in the bite is in the proxy even though it is outside the shape
  bool bite = false;
  for (const Vec2& q : proxy) bite = bite || (q.x > 120 && q.x < 140 && q.y > 140 && q.y < 160);
  CHECK(bite);
}

TEST_CASE("mask ingestion recovers rectangles") {
  LabelRaster mask(64, 64, 0);
  RgbImage img(64, 64, {255, 255, 255});
  for (int y = 10; y < 30; ++y) {
    for (int x = 5; x < 25; ++x) {
      mask.at(x, y) = 3;
      img.set(x, y, {200, 0, 0});
    }
  }
  for (int y = 40; y < 50; ++y) {
    for (int x = 40; x < 60; ++x) mask.at(x, y) = 7;
  }
  const Scene s = ingest_mask(mask, img, {{3, "box:lid"}, {7, "box:body"}});
  REQUIRE(s.segments.size() == 2);
  CHECK(std::abs(signed_area(s.segment(0).paths[0])) == doctest::Approx(400));
  CHECK(s.segment(0).color == Rgb{200, 0, 0});
  CHECK(s.segment(0).paths[0].size() == 4);
  CHECK(std::abs(signed_area(s.segment(1).paths[0])) == doctest::Approx(200));
  CHECK(s.background == Rgb{255, 255, 255});
  CHECK_THROWS_WITH_AS(ingest_mask(mask, img, {{3, "box:lid"}}), "unlabeled mask values: 7", ValidationError);
}

TEST_CASE("traced boundary of a random blob encloses exactly its pixels") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Grid<int> g(40, 40, 0);
    // random walk blob, 4-connected by construction
    int x = 20, y = 20;
    for (int i = 0; i < 200; ++i) {
      g.at(x, y) = 1;
      switch (rng() % 4) {
        case 0: x = std::min(x + 1, 38); break;
        case 1: x = std::max(x - 1, 1); break;
        case 2: y = std::min(y + 1, 38); break;
        default: y = std::max(y - 1, 1); break;
      }
    }
    int sx = 0, sy = 0;
    for (int yy = 39; yy >= 0; --yy)
      for (int xx = 39; xx >= 0; --xx)
        if (g.at(xx, yy)) sx = xx, sy = yy;
    const Path outline = trace_outer_boundary(g, 1, sx, sy);
    // every blob pixel centre is inside the outline (holes are filled)
    for (int yy = 0; yy < 40; ++yy)
      for (int xx = 0; xx < 40; ++xx)
        if (g.at(xx, yy)) CHECK(point_in_loop({xx + 0.5, yy + 0.5}, outline));
  }
}
