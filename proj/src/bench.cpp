#include "iconforge/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <thread>

#include "iconforge/errors.hpp"
#include "iconforge/solver.hpp"

namespace iconforge {

namespace {

double mean_nearest(std::span<const Vec2> from, std::span<const Vec2> to) {
  double total = 0;
  for (const Vec2& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& q : to) best = std::min(best, norm2(p - q));
    total += std::sqrt(best);
  }
  return total / static_cast<double>(from.size());
}

bool same_samples(const Segment& a, const Segment& b) {
  if (a.samples.size() != b.samples.size()) return false;
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    if (norm(a.samples[k] - b.samples[k]) > 1e-6) return false;
  }
  return true;
}

}  // namespace

double chamfer(std::span<const Vec2> pred, std::span<const Vec2> gt) {
  if (pred.empty() || gt.empty()) throw ValidationError("chamfer: empty point set");
  return 0.5 * (mean_nearest(pred, gt) + mean_nearest(gt, pred));
}

double chamfer_relative(std::span<const Vec2> pred, std::span<const Vec2> gt, double gt_size) {
  if (!(gt_size > 0)) throw ValidationError("chamfer: ground-truth segment has zero size");
  return chamfer(pred, gt) / gt_size;
}

double segment_size(const Segment& gt, SizeMode mode) {
  if (mode == SizeMode::SqrtArea) {
    double area = 0;
    for (const Path& p : gt.paths) area += std::abs(signed_area(p));
    return std::sqrt(area);
  }
  std::vector<Vec2> all;
  for (const Path& p : gt.paths) all.insert(all.end(), p.begin(), p.end());
  return bbox(all).diagonal();
}

double chamfer_relative(const Segment& pred, const Segment& gt, SizeMode mode) {
  return chamfer_relative(pred.samples, gt.samples, segment_size(gt, mode));
}

SceneChamfer scene_chamfer(const Scene& pred, const Scene& gt, const Scene* source, SizeMode mode) {
  if (pred.segments.size() != gt.segments.size()) {
    throw ValidationError("chamfer: scenes have " + std::to_string(pred.segments.size()) + " and " +
                          std::to_string(gt.segments.size()) + " segments");
  }
  SceneChamfer out;
  for (std::size_t k = 0; k < gt.segments.size(); ++k) {
    const Segment& p = pred.segments[k];
    const Segment& g = gt.segments[k];
    if (p.id != g.id) throw ValidationError("chamfer: segment seg" + std::to_string(g.id) + " has no pair");
    bool edited = true;
    if (source) {
      if (!source->has_segment(g.id)) throw ValidationError("chamfer: source lacks seg" + std::to_string(g.id));
      const Segment& s = source->segment(g.id);
      edited = !same_samples(p, s) || !same_samples(g, s);
    }
    if (edited) out.segments.push_back(g.id);
  }
  if (out.segments.empty()) {
    for (const Segment& g : gt.segments) out.segments.push_back(g.id);
  }
  double total = 0;
  for (int id : out.segments) {
    const double v = chamfer_relative(pred.segment(id), gt.segment(id), mode);
    out.values.push_back(v);
    total += v;
  }
  out.mean = out.segments.empty() ? 0.0 : total / static_cast<double>(out.segments.size());
  return out;
}

double image_mse(const RgbImage& a, const RgbImage& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ValidationError("mse: image sizes differ (" + std::to_string(a.width) + "x" + std::to_string(a.height) +
                          " vs " + std::to_string(b.width) + "x" + std::to_string(b.height) + ")");
  }
  if (a.pixels.empty()) return 0.0;
  double total = 0;
  for (std::size_t k = 0; k < a.pixels.size(); ++k) {
    const double d = static_cast<double>(a.pixels[k]) - static_cast<double>(b.pixels[k]);
    total += d * d;
  }
  return total / static_cast<double>(a.pixels.size());
}

std::vector<BenchCase> parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<BenchCase> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto resolve = [&](const std::string& v) {
    const std::filesystem::path p(v);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string head;
    if (!(words >> head)) continue;
    if (head != "case") throw ParseError("expected 'case NAME key=value ...'", line_no);
    BenchCase c;
    if (!(words >> c.name)) throw ParseError("case without a name", line_no);
    std::string kv;
    std::string rest;
    std::getline(words, rest);
    // request="..." may contain spaces
    std::size_t pos = 0;
    while (pos < rest.size()) {
      while (pos < rest.size() && std::isspace(static_cast<unsigned char>(rest[pos]))) ++pos;
      if (pos >= rest.size()) break;
      const auto eq = rest.find('=', pos);
      if (eq == std::string::npos) throw ParseError("expected key=value in case " + c.name, line_no);
      const std::string key = rest.substr(pos, eq - pos);
      std::string value;
      pos = eq + 1;
      if (pos < rest.size() && rest[pos] == '"') {
        const auto close = rest.find('"', pos + 1);
        if (close == std::string::npos) throw ParseError("unterminated quote in case " + c.name, line_no);
        value = rest.substr(pos + 1, close - pos - 1);
        pos = close + 1;
      } else {
        const auto end = rest.find_first_of(" \t", pos);
        value = rest.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        pos = end == std::string::npos ? rest.size() : end;
      }
      if (key == "scene") c.scene = resolve(value);
      else if (key == "program") c.program = resolve(value);
      else if (key == "request") c.request = value;
      else if (key == "gt_motions") c.gt_motions = resolve(value);
      else if (key == "gt_scene") c.gt_scene = resolve(value);
      else if (key == "tags") {
        std::istringstream t(value);
        std::string tag;
        while (std::getline(t, tag, ',')) {
          if (!tag.empty()) c.tags.push_back(tag);
        }
      } else {
        throw ParseError("unknown key '" + key + "' in case " + c.name, line_no);
      }
    }
    if (c.scene.empty()) throw ParseError("case " + c.name + " has no scene", line_no);
    if (c.program.empty() && c.request.empty()) throw ParseError("case " + c.name + " has no program or request", line_no);
    if (c.gt_motions.empty() == c.gt_scene.empty()) {
      throw ParseError("case " + c.name + " needs exactly one of gt_motions and gt_scene", line_no);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<BenchCase> load_manifest(const std::filesystem::path& file) {
  return parse_manifest(read_text_file(file), file.parent_path());
}

CaseResult run_case(const BenchCase& c, const PipelineConfig& cfg, BenchMode mode) {
  CaseResult r;
  r.name = c.name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Scene scene = load_scene(c.scene, cfg.scene);
    dsl::ConstraintProgram program;
    if (mode == BenchMode::Llm && !c.request.empty()) {
      const RelationGraph g = build_graph(scene, cfg.relations);
      program = llm::request_program(c.request, scene, g, cfg.llm).programs.at(0);
    } else {
      if (c.program.empty()) throw ValidationError("no program file (offline mode)");
      program = dsl::parse(read_text_file(c.program), scene);
    }
    const EditResult edit = run_edit(scene, program, cfg);
    const Scene pred = apply_motions(scene, edit.search.solve.motions, cfg.scene);
    const Scene gt = c.gt_scene.empty() ? apply_motions(scene, load_motions(c.gt_motions.string(), scene), cfg.scene)
                                        : load_scene(c.gt_scene, cfg.scene);
    r.cd = scene_chamfer(pred, gt, &scene, cfg.chamfer_size).mean;
    const RgbImage gt_image = rasterize(gt, {}, resolve_order(gt, {}, cfg.order_mode, cfg.depth).order);
    r.mse = image_mse(edit.image, gt_image);
    r.score = edit.search.solve.score;
    r.solves = edit.search.solves;
    r.states = describe(edit.search.states, edit.graph);
    r.motions = edit.search.solve.motions;
    r.ok = true;
  } catch (const Error& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

BenchReport run_cases(const std::vector<BenchCase>& cases, const PipelineConfig& cfg, BenchMode mode) {
  BenchReport report;
  report.cases.resize(cases.size());
  // Cases are independent; each worker writes only its own slot.
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < cases.size(); k = next++) report.cases[k] = run_case(cases[k], cfg, mode);
  };
  const unsigned workers = std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                                              static_cast<unsigned>(cases.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  double cd = 0, mse = 0;
  for (const CaseResult& r : report.cases) {
    if (!r.ok) continue;
    ++report.ok_count;
    cd += r.cd;
    mse += r.mse;
  }
  if (report.ok_count > 0) {
    report.mean_cd = cd / report.ok_count;
    report.mean_mse = mse / report.ok_count;
  }
  return report;
}

BenchReport run_manifest(const std::filesystem::path& manifest, const PipelineConfig& cfg, BenchMode mode) {
  return run_cases(load_manifest(manifest), cfg, mode);
}

std::string report_table(const BenchReport& report) {
  std::size_t width = 4;
  for (const CaseResult& r : report.cases) width = std::max(width, r.name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %8s  %10s  %8s  %6s  %7s\n", static_cast<int>(width), "case", "CD", "MSE",
                "score", "solves", "time_s");
  out += buf;
  for (const CaseResult& r : report.cases) {
    if (r.ok) {
      std::snprintf(buf, sizeof buf, "%-*s  %8.4f  %10.2f  %8.4f  %6d  %7.2f\n", static_cast<int>(width),
                    r.name.c_str(), r.cd, r.mse, r.score, r.solves, r.seconds);
    } else {
      std::snprintf(buf, sizeof buf, "%-*s  error: %s\n", static_cast<int>(width), r.name.c_str(), r.error.c_str());
    }
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-*s  %8.4f  %10.2f  (%d of %zu cases)\n", static_cast<int>(width), "mean",
                report.mean_cd, report.mean_mse, report.ok_count, report.cases.size());
  out += buf;
  return out;
}

std::string report_json(const BenchReport& report) {
  nlohmann::json j;
  j["mean_cd"] = report.mean_cd;
  j["mean_mse"] = report.mean_mse;
  j["ok_count"] = report.ok_count;
  j["cases"] = nlohmann::json::array();
  for (const CaseResult& r : report.cases) {
    nlohmann::json c{{"name", r.name}, {"ok", r.ok}};
    if (r.ok) {
      c["cd"] = r.cd;
      c["mse"] = r.mse;
      c["score"] = r.score;
      c["solves"] = r.solves;
      c["states"] = r.states;
    } else {
      c["error"] = r.error;
    }
    c["seconds"] = r.seconds;
    j["cases"].push_back(c);
  }
  return j.dump(2) + "\n";
}

}  // namespace iconforge
