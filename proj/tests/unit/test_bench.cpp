#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

#include "iconforge/bench.hpp"
#include "iconforge/errors.hpp"
#include "shapes.hpp"

using namespace iconforge;
using namespace iconforge::testing;

namespace {

// O(N^2) reference: symmetric mean of nearest distances, written out longhand.
double chamfer_oracle(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  auto one_way = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double sum = 0;
    for (const Vec2& p : from) {
      double best = 1e300;
      for (const Vec2& q : to) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return 0.5 * (one_way(a, b) + one_way(b, a));
}

double diag(const Path& p) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const Vec2& v : p) {
    x0 = std::min(x0, v.x), y0 = std::min(y0, v.y), x1 = std::max(x1, v.x), y1 = std::max(y1, v.y);
  }
  return std::hypot(x1 - x0, y1 - y0);
}

Path scaled(const Path& p, double s, Vec2 c) {
  Path out;
  for (const Vec2& v : p) out.push_back({c.x + s * (v.x - c.x), c.y + s * (v.y - c.y)});
  return out;
}

Path shifted(const Path& p, Vec2 d) {
  Path out;
  for (const Vec2& v : p) out.push_back({v.x + d.x, v.y + d.y});
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("iconforge_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& f, const std::string& text) { std::ofstream(f) << text; }

}  // namespace

TEST_CASE("chamfer: identity is exactly zero") {
  const Scene s = make_scene({{"a", "x", rect(10, 10, 60, 40)}, {"b", "y", disk(200, 200, 30)}});
  const SceneChamfer cd = scene_chamfer(s, s);
  CHECK(cd.mean == 0.0);
  CHECK(cd.segments.size() == 2);
  CHECK(chamfer_relative(s.segments[0], s.segments[0]) == 0.0);
}

TEST_CASE("chamfer: scaled and translated squares against the brute-force oracle") {
  const Path sq = rect(100, 100, 110, 110);
  const Scene base = make_scene({{"a", "x", sq}});
  const Scene big = make_scene({{"a", "x", scaled(sq, 2.0, {105, 105})}});
  const Scene moved = make_scene({{"a", "x", shifted(sq, {100, 0})}});
  const auto& s0 = base.segments[0].samples;

  const double v_big = chamfer_relative(big.segments[0], base.segments[0]);
  CHECK(v_big > 0);
  CHECK(v_big == doctest::Approx(chamfer_oracle(big.segments[0].samples, s0) / diag(sq)).epsilon(1e-12));

  CHECK(diag(sq) == doctest::Approx(14.142).epsilon(1e-4));
  const double v_moved = chamfer_relative(moved.segments[0], base.segments[0]);
  CHECK(std::abs(v_moved - chamfer_oracle(moved.segments[0].samples, s0) / diag(sq)) < 1e-9);
}

TEST_CASE("chamfer: 20 random pairs match the oracle, symmetric, translation invariant") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pos(40, 400), rad(5, 60);
  for (int k = 0; k < 20; ++k) {
    const Path a = k % 2 ? disk(pos(rng), pos(rng), rad(rng), 7 + k) : rect(pos(rng), pos(rng), 450, 460);
    const Path b = disk(pos(rng), pos(rng), rad(rng), 5 + k);
    const Scene s = make_scene({{"p", "a", a}, {"p", "b", b}});
    const auto& pa = s.segments[0].samples;
    const auto& pb = s.segments[1].samples;
    CHECK(std::abs(chamfer(pa, pb) - chamfer_oracle(pa, pb)) < 1e-9);
    CHECK(chamfer(pa, pb) == chamfer(pb, pa));

    const Vec2 d{pos(rng) - 200, pos(rng) - 200};
    const Scene t = make_scene({{"p", "a", shifted(a, d)}, {"p", "b", shifted(b, d)}});
    CHECK(std::abs(chamfer_relative(s.segments[0], s.segments[1]) - chamfer_relative(t.segments[0], t.segments[1])) <
          1e-9);
  }
}

TEST_CASE("chamfer: size modes and scene pairing") {
  const Path sq = rect(0, 0, 30, 40);
  const Scene s = make_scene({{"a", "x", sq}});
  CHECK(segment_size(s.segments[0], SizeMode::BboxDiagonal) == doctest::Approx(50.0));
  CHECK(segment_size(s.segments[0], SizeMode::SqrtArea) == doctest::Approx(std::sqrt(1200.0)));

  const Scene two = make_scene({{"a", "x", sq}, {"b", "y", rect(100, 100, 120, 120)}});
  CHECK_THROWS_AS(scene_chamfer(s, two), ValidationError);

  // Only segments that differ from the source are scored.
  const Scene edited = make_scene({{"a", "x", sq}, {"b", "y", rect(110, 100, 130, 120)}});
  const SceneChamfer cd = scene_chamfer(edited, edited, &two);
  CHECK(cd.segments == std::vector<int>{1});
  CHECK(cd.mean == 0.0);
  const SceneChamfer off = scene_chamfer(two, edited, &two);
  CHECK(off.segments == std::vector<int>{1});
  CHECK(off.mean > 0.0);
}

TEST_CASE("mse: analytic values and errors") {
  const RgbImage black(8, 6, Rgb{0, 0, 0});
  const RgbImage white(8, 6, Rgb{255, 255, 255});
  RgbImage half(8, 6, Rgb{0, 0, 0});
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 4; ++x) half.set(x, y, Rgb{255, 255, 255});
  }
  CHECK(image_mse(black, black) == 0.0);
  CHECK(image_mse(black, white) == 65025.0);
  CHECK(image_mse(half, black) == 32512.5);
  CHECK(image_mse(black, half) == image_mse(half, black));
  CHECK_THROWS_AS(image_mse(black, RgbImage(6, 8)), ValidationError);

  std::mt19937 rng(3);
  std::uniform_int_distribution<int> px(0, 255);
  RgbImage a(5, 5), b(5, 5);
  for (auto& v : a.pixels) v = static_cast<std::uint8_t>(px(rng));
  for (auto& v : b.pixels) v = static_cast<std::uint8_t>(px(rng));
  CHECK(image_mse(a, b) > 0);
  CHECK(image_mse(a, b) == image_mse(b, a));
}

TEST_CASE("manifest: parsing and errors") {
  const auto cases = parse_manifest(
      "# comment\n\n"
      "case one scene=s.json program=p.icp gt_motions=g.json tags=a,b\n"
      "case two scene=/abs/s.json request=\"move it left\" gt_scene=gt.json  # trailing\n",
      "/base");
  REQUIRE(cases.size() == 2);
  CHECK(cases[0].name == "one");
  CHECK(cases[0].scene == std::filesystem::path("/base/s.json"));
  CHECK(cases[0].tags == std::vector<std::string>{"a", "b"});
  CHECK(cases[1].scene == std::filesystem::path("/abs/s.json"));
  CHECK(cases[1].request == "move it left");
  CHECK(cases[1].gt_scene == std::filesystem::path("/base/gt.json"));

  CHECK_THROWS_WITH_AS(parse_manifest("run x scene=a"), doctest::Contains("line 1"), ParseError);
  CHECK_THROWS_WITH_AS(parse_manifest("\ncase x scene=a program=b"), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(parse_manifest("case x scene=a program=b gt_motions=c gt_scene=d"), ParseError);
  CHECK_THROWS_AS(parse_manifest("case x scene=a program=b gt_motions=c color=red"), ParseError);
  CHECK_THROWS_AS(parse_manifest("case x scene=a request=\"open gt_motions=c"), ParseError);
  CHECK_THROWS_AS(parse_manifest("case x program=b gt_motions=c"), ParseError);
}

TEST_CASE("bench: missing file is recorded and the other cases complete") {
  const auto dir = temp_dir("bench_missing");
  const Scene s = make_scene({{"box", "body", rect(100, 100, 160, 160)}, {"ball", "body", disk(300, 300, 30)}});
  write(dir / "scene.json", dump_scene(s));
  write(dir / "stay.icp", "stay(seg0)\n");
  write(dir / "id_gt.json", "{\"motions\": []}\n");
  write(dir / "move.icp", "move(seg1)\nequal(center_x(seg1), center_x(old(seg1)) + 40)\n");
  write(dir / "move_gt.json", "{\"motions\": [{\"id\": 1, \"tx\": 40}]}\n");
  write(dir / "manifest.txt",
        "case identity scene=scene.json program=stay.icp gt_motions=id_gt.json\n"
        "case lost scene=nowhere.json program=stay.icp gt_motions=id_gt.json\n"
        "case shift scene=scene.json program=move.icp gt_motions=move_gt.json\n");

  const BenchReport r = run_manifest(dir / "manifest.txt", PipelineConfig{});
  REQUIRE(r.cases.size() == 3);
  CHECK(r.ok_count == 2);
  CHECK(r.cases[0].ok);
  CHECK(r.cases[0].cd == 0.0);
  CHECK(r.cases[0].mse == 0.0);
  CHECK_FALSE(r.cases[1].ok);
  CHECK(r.cases[1].error.find("nowhere.json") != std::string::npos);
  CHECK(r.cases[2].ok);
  CHECK(r.cases[2].cd < 0.01);

  const std::string table = report_table(r);
  CHECK(table.find("lost") != std::string::npos);
  CHECK(table.find("error:") != std::string::npos);
  CHECK(table.find("(2 of 3 cases)") != std::string::npos);
  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["cases"].size() == 3);
  CHECK(j["ok_count"] == 2);
  CHECK(j["cases"][1]["ok"] == false);
}

TEST_CASE("bench: bundled toy manifest gives 8 rows and a mean") {
  const BenchReport r = run_manifest(std::filesystem::path(ICONFORGE_BENCH) / "toy" / "manifest.txt", PipelineConfig{});
  CHECK(r.cases.size() == 8);
  CHECK(r.ok_count == 8);
  const std::string table = report_table(r);
  CHECK(std::count(table.begin(), table.end(), '\n') == 10);
  CHECK(table.find("mean") != std::string::npos);
}
