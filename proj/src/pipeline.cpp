#include "iconforge/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <variant>

#include "iconforge/errors.hpp"

namespace iconforge {

namespace {

using Field = std::variant<int*, double*, bool*, std::string*, std::uint64_t*, OrderMode*, SizeMode*>;

std::vector<std::pair<std::string, Field>> fields(PipelineConfig& c) {
  SolveConfig& s = c.search.solve;
  return {
      {"seed", &c.seed},
      {"scene.samples_per_path", &c.scene.samples_per_path},
      {"scene.proxy_rays", &c.scene.proxy_rays},
      {"scene.proxy_ratio", &c.scene.proxy_ratio},
      {"scene.proxy_stride", &c.scene.proxy_stride},
      {"scene.simplify_tolerance", &c.scene.simplify_tolerance},
      {"scene.min_component_px", &c.scene.min_component_px},
      {"relations.inside_ratio", &c.relations.inside_ratio},
      {"relations.overlap_min_px", &c.relations.overlap_min_px},
      {"relations.overlap_min_fraction", &c.relations.overlap_min_fraction},
      {"relations.proxy_rays", &c.relations.proxy_rays},
      {"relations.proxy_ratio", &c.relations.proxy_ratio},
      {"eval.band_fraction", &s.eval.band_fraction},
      {"eval.overlap_depth", &s.eval.overlap_depth},
      {"eval.detach_gap", &s.eval.detach_gap},
      {"eval.temperature", &s.eval.temperature},
      {"solve.max_iters", &s.max_iters},
      {"solve.lr0", &s.lr0},
      {"solve.lr_decay", &s.lr_decay},
      {"solve.lr_floor", &s.lr_floor},
      {"solve.lr_translation", &s.lr_translation},
      {"solve.lr_rotation", &s.lr_rotation},
      {"solve.lr_log_scale", &s.lr_log_scale},
      {"solve.beta1", &s.beta1},
      {"solve.beta2", &s.beta2},
      {"solve.adam_eps", &s.adam_eps},
      {"solve.eps_conv", &s.eps_conv},
      {"solve.stall_rel", &s.stall_rel},
      {"solve.stall_window", &s.stall_window},
      {"solve.stall_lr_fraction", &s.stall_lr_fraction},
      {"search.eps_stop", &c.search.eps_stop},
      {"search.tie", &c.search.tie},
      {"search.eps_sat", &c.search.eps_sat},
      {"search.max_powerset_front", &c.search.max_powerset_front},
      {"search.budget", &c.search.budget},
      {"search.relation_search", &c.search.relation_search},
      {"search.motion_search", &c.search.motion_search},
      {"search.warm_start", &c.search.warm_start},
      {"render.max_boundary_points", &c.depth.max_boundary_points},
      {"render.band", &c.depth.band},
      {"render.order_mode", &c.order_mode},
      {"llm.endpoint", &c.llm.endpoint},
      {"llm.model", &c.llm.model},
      {"llm.temperature", &c.llm.temperature},
      {"llm.timeout_s", &c.llm.timeout_s},
      {"llm.max_retries", &c.llm.max_retries},
      {"llm.alternatives", &c.llm.alternatives},
      {"bench.chamfer_size", &c.chamfer_size},
  };
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
bool parse_number(const std::string& v, T& out) {
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc() && ptr == v.data() + v.size();
}

std::string order_mode_name(OrderMode m) {
  switch (m) {
    case OrderMode::Auto: return "auto";
    case OrderMode::Input: return "input";
    case OrderMode::InitialConfig: return "initial-config";
  }
  return "auto";
}

std::string fmt_double(double v) {
  // Shortest of the two that reads back exactly.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void apply_config(std::string_view text, PipelineConfig& cfg) {
  auto table = fields(cfg);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
    if (it == table.end()) throw ParseError("unknown config key '" + key + "'", line_no);
    const auto bad = [&] { return ParseError("bad value '" + value + "' for " + key, line_no); };
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1") *p = true;
            else if (value == "false" || value == "0") *p = false;
            else throw bad();
          } else if constexpr (std::is_same_v<T, std::string>) {
            *p = value;
          } else if constexpr (std::is_same_v<T, OrderMode>) {
            try {
              *p = parse_order_mode(value);
            } catch (const ValidationError&) {
              throw bad();
            }
          } else if constexpr (std::is_same_v<T, SizeMode>) {
            if (value == "bbox_diagonal") *p = SizeMode::BboxDiagonal;
            else if (value == "sqrt_area") *p = SizeMode::SqrtArea;
            else throw bad();
          } else {
            if (!parse_number(value, *p)) throw bad();
          }
        },
        it->second);
  }
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void load_config(const std::filesystem::path& file, PipelineConfig& cfg) {
  try {
    apply_config(read_text_file(file), cfg);
  } catch (const ParseError& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
}

std::string dump_config(const PipelineConfig& cfg) {
  PipelineConfig copy = cfg;
  std::string out;
  for (const auto& [key, field] : fields(copy)) {
    std::string value = std::visit(
        [](auto* p) -> std::string {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, bool>) return *p ? "true" : "false";
          else if constexpr (std::is_same_v<T, std::string>) return *p;
          else if constexpr (std::is_same_v<T, OrderMode>) return order_mode_name(*p);
          else if constexpr (std::is_same_v<T, SizeMode>) return *p == SizeMode::SqrtArea ? "sqrt_area" : "bbox_diagonal";
          else if constexpr (std::is_same_v<T, double>) return fmt_double(*p);
          else return std::to_string(*p);
        },
        field);
    out += key + " = " + value + "\n";
  }
  return out;
}

EditResult run_edit(const Scene& scene, const dsl::ConstraintProgram& program, const PipelineConfig& cfg) {
  const dsl::ValidationReport report = dsl::validate(program, scene);
  if (!report.ok()) throw ValidationError(report.text());
  EditResult out;
  out.program = program;
  out.graph = build_graph(scene, cfg.relations);
  out.search = flip_and_solve(scene, program, out.graph, cfg.search);
  out.order = resolve_order(scene, out.search.solve.motions, cfg.order_mode, cfg.depth);
  out.image = rasterize(scene, out.search.solve.motions, out.order.order);
  return out;
}

}  // namespace iconforge
