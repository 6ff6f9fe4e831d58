// iconforge command line: validate, relations, solve, render, edit, eval, bench.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "iconforge/bench.hpp"
#include "iconforge/errors.hpp"
#include "iconforge/pipeline.hpp"
#include "iconforge/solver.hpp"

using namespace iconforge;

namespace {

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file);
  out << text;
  if (!out) throw IoError("write failed for " + file);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::pair<int, int> parse_size(const std::string& text, const Scene& scene) {
  if (text.empty()) return {scene.width, scene.height};
  int w = 0, h = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%dx%d%c", &w, &h, &tail) == 2 && w > 0 && h > 0) return {w, h};
  if (std::sscanf(text.c_str(), "%d%c", &w, &tail) == 1 && w > 0) return {w, w};
  throw ValidationError("bad --size '" + text + "' (use N or WxH)");
}

void print_trace(const std::vector<TraceEntry>& trace) {
  for (const TraceEntry& t : trace) {
    std::fprintf(stderr, "[%s] %-9s score=%.6f  %s\n", t.pass.c_str(), t.accepted ? "accepted" : "rejected", t.score,
                 t.candidate.c_str());
  }
}

void write_image(const std::string& out, const Scene& scene, const MotionMap& motions, const DepthOrder& order,
                 std::pair<int, int> size) {
  if (ends_with(out, ".svg")) {
    write_text(out, export_svg(scene, motions, order.order));
  } else {
    write_png(out, rasterize(scene, motions, order.order, size.first, size.second));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iconforge: constraint-based editing of segmented icons"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  std::uint64_t seed = 0;
  std::string config_file;
  bool quiet = false, verbose = false, print_config = false;
  app.add_option("--seed", seed, "Seed recorded with the run (the pipeline is deterministic)");
  app.add_option("--config", config_file, "key = value file overriding module defaults");
  app.add_flag("--quiet", quiet, "Errors only");
  app.add_flag("--verbose", verbose, "Debug logging");
  app.add_flag("--print-config", print_config, "Print every config key with its value and exit");
  app.require_subcommand(0, 1);

  // validate
  auto* validate = app.add_subcommand("validate", "Check a program against a scene");
  std::string v_scene, v_program;
  validate->add_option("scene", v_scene)->required();
  validate->add_option("program", v_program)->required();

  // relations
  auto* relations = app.add_subcommand("relations", "Detect relations and print the graph as JSON");
  std::string r_scene, r_out;
  relations->add_option("scene", r_scene)->required();
  relations->add_option("-o,--output", r_out, "Write JSON here instead of stdout");

  // solve
  auto* solve = app.add_subcommand("solve", "Search relation and motion states, write motions");
  std::string s_scene, s_program, s_out;
  bool s_trace = false;
  solve->add_option("scene", s_scene)->required();
  solve->add_option("program", s_program)->required();
  solve->add_option("-o,--output", s_out, "Motions JSON (stdout when omitted)");
  solve->add_flag("--trace", s_trace, "Per-flip log on stderr");

  // render
  auto* render = app.add_subcommand("render", "Rasterize or vectorize a scene");
  std::string d_scene, d_motions, d_out, d_size, d_order;
  render->add_option("scene", d_scene)->required();
  render->add_option("--motions", d_motions, "Motions JSON to apply");
  render->add_option("-o,--output", d_out, "out.png or out.svg")->required();
  render->add_option("--size", d_size, "N or WxH (PNG only)");
  render->add_option("--order-mode", d_order, "auto, input or initial-config")
      ->check(CLI::IsMember({"auto", "input", "initial-config"}));

  // edit
  auto* edit = app.add_subcommand("edit", "Full pipeline: program (or request), search, render");
  std::string e_scene, e_request, e_program, e_out, e_motions, e_size, e_order;
  bool e_trace = false;
  edit->add_option("scene", e_scene)->required();
  auto* e_req_opt = edit->add_option("--request", e_request, "Editing request for the LLM endpoint");
  auto* e_prog_opt = edit->add_option("--program", e_program, "Hand-written program (no network)");
  e_req_opt->excludes(e_prog_opt);
  edit->add_option("-o,--output", e_out, "out.png or out.svg")->required();
  edit->add_option("--motions-out", e_motions, "Also write the motions JSON");
  edit->add_option("--size", e_size, "N or WxH (PNG only)");
  edit->add_option("--order-mode", e_order, "auto, input or initial-config")
      ->check(CLI::IsMember({"auto", "input", "initial-config"}));
  edit->add_flag("--trace", e_trace, "Per-flip log on stderr");

  // eval
  auto* eval = app.add_subcommand("eval", "Compare a prediction with ground truth");
  std::string m_pred, m_gt, m_metric, m_source;
  eval->add_option("pred", m_pred, "Scene JSON (cd) or PNG (mse)")->required();
  eval->add_option("gt", m_gt, "Scene JSON (cd) or PNG (mse)")->required();
  eval->add_option("--metric", m_metric)->required()->check(CLI::IsMember({"cd", "mse"}));
  eval->add_option("--source", m_source, "Unedited scene; limits cd to edited segments");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark manifest");
  std::string b_manifest, b_json;
  bool b_llm = false, b_no_rel = false, b_no_mot = false;
  bench->add_option("manifest", b_manifest)->required();
  bench->add_option("--json", b_json, "Machine-readable report");
  bench->add_flag("--llm", b_llm, "Use requests through the LLM endpoint instead of program files");
  bench->add_flag("--no-relation-search", b_no_rel, "Keep every relation Strong");
  bench->add_flag("--no-motion-search", b_no_mot, "Force every unpinned segment to TRS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto logger = spdlog::stderr_color_mt("iconforge");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%l: %v");
  spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    PipelineConfig cfg;
    cfg.llm = llm::from_env(cfg.llm);
    if (!config_file.empty()) load_config(config_file, cfg);
    if (app.count("--seed")) cfg.seed = seed;
    if (print_config) {
      std::cout << dump_config(cfg);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 2;
    }

    if (*validate) {
      const Scene scene = load_scene(v_scene, cfg.scene);
      const auto program = dsl::parse(read_text_file(v_program), scene);
      const auto report = dsl::validate(program, scene);
      std::cout << report.text();
      return report.ok() ? 0 : 1;
    }
    if (*relations) {
      const Scene scene = load_scene(r_scene, cfg.scene);
      const std::string json = dump_relations(build_graph(scene, cfg.relations), scene);
      if (r_out.empty()) std::cout << json;
      else write_text(r_out, json);
      return 0;
    }
    if (*solve) {
      const Scene scene = load_scene(s_scene, cfg.scene);
      const auto program = dsl::parse(read_text_file(s_program), scene);
      const auto report = dsl::validate(program, scene);
      if (!report.ok()) throw ValidationError(report.text());
      const RelationGraph graph = build_graph(scene, cfg.relations);
      const SearchResult r = flip_and_solve(scene, program, graph, cfg.search);
      if (s_trace) print_trace(r.trace);
      spdlog::info("final {} score {:.6f} ({} solves)", describe(r.states, graph), r.solve.score, r.solves);
      if (r.solve.unsatisfiable) spdlog::warn("unsatisfiable under the chosen states (score {:.4f})", r.solve.score);
      const std::string json = dump_motions(scene, r.solve.motions);
      if (s_out.empty()) std::cout << json;
      else write_text(s_out, json);
      return 0;
    }
    if (*render) {
      if (!d_order.empty()) cfg.order_mode = parse_order_mode(d_order);
      const Scene scene = load_scene(d_scene, cfg.scene);
      const MotionMap motions = d_motions.empty() ? MotionMap{} : load_motions(d_motions, scene);
      const DepthOrder order = resolve_order(scene, motions, cfg.order_mode, cfg.depth);
      write_image(d_out, scene, motions, order, parse_size(d_size, scene));
      return 0;
    }
    if (*edit) {
      if (!e_order.empty()) cfg.order_mode = parse_order_mode(e_order);
      if (e_request.empty() && e_program.empty()) throw ValidationError("edit needs --request or --program");
      const Scene scene = load_scene(e_scene, cfg.scene);
      dsl::ConstraintProgram program;
      if (!e_program.empty()) {
        program = dsl::parse(read_text_file(e_program), scene);
      } else {
        const auto res = llm::request_program(e_request, scene, build_graph(scene, cfg.relations), cfg.llm);
        if (res.programs.size() > 1) spdlog::info("using the first of {} interpretations", res.programs.size());
        program = res.programs.front();
        std::cerr << "program:\n" << dsl::serialize(program);
      }
      const EditResult r = run_edit(scene, program, cfg);
      if (e_trace) print_trace(r.search.trace);
      if (!quiet) {
        std::fprintf(stderr, "final %s score %.6f (%d solves)\n", describe(r.search.states, r.graph).c_str(),
                     r.search.solve.score, r.search.solves);
      }
      if (!e_motions.empty()) write_text(e_motions, dump_motions(scene, r.search.solve.motions));
      const auto size = parse_size(e_size, scene);
      if (!ends_with(e_out, ".svg") && size == std::pair{scene.width, scene.height}) {
        write_png(e_out, r.image);
      } else {
        write_image(e_out, scene, r.search.solve.motions, r.order, size);
      }
      return 0;
    }
    if (*eval) {
      if (m_metric == "mse") {
        std::printf("%.6f\n", image_mse(read_png_rgb(m_pred), read_png_rgb(m_gt)));
      } else {
        const Scene pred = load_scene(m_pred, cfg.scene);
        const Scene gt = load_scene(m_gt, cfg.scene);
        std::optional<Scene> source;
        if (!m_source.empty()) source = load_scene(m_source, cfg.scene);
        const SceneChamfer cd = scene_chamfer(pred, gt, source ? &*source : nullptr, cfg.chamfer_size);
        std::printf("%.9f\n", cd.mean);
      }
      return 0;
    }
    if (*bench) {
      if (b_no_rel) cfg.search.relation_search = false;
      if (b_no_mot) cfg.search.motion_search = false;
      const BenchReport report = run_manifest(b_manifest, cfg, b_llm ? BenchMode::Llm : BenchMode::Program);
      std::cout << report_table(report);
      if (!b_json.empty()) write_text(b_json, report_json(report));
      return report.ok_count == static_cast<int>(report.cases.size()) ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
