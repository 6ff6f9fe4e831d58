#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "iconforge/dsl.hpp"
#include "iconforge/llm.hpp"
#include "iconforge/relations.hpp"
#include "iconforge/render.hpp"
#include "iconforge/scene.hpp"
#include "iconforge/search.hpp"

namespace iconforge {

enum class SizeMode { BboxDiagonal, SqrtArea };

/// Every tunable default in one place; `--config` files override fields by
/// dotted key (dump_config lists them).
struct PipelineConfig {
  SceneConfig scene;
  RelationConfig relations;
  SearchConfig search;  // search.solve holds the optimizer and evaluator settings
  DepthConfig depth;
  OrderMode order_mode = OrderMode::Auto;
  llm::LlmConfig llm;
  SizeMode chamfer_size = SizeMode::BboxDiagonal;
  /// The pipeline makes no random choices; the seed is recorded for
  /// reproducibility of runs and reports.
  std::uint64_t seed = 0;
};

/// Applies "key = value" lines ('#' comments). Unknown keys and malformed
/// values raise ParseError with the line number.
void apply_config(std::string_view text, PipelineConfig& cfg);
void load_config(const std::filesystem::path& file, PipelineConfig& cfg);
/// Every key with its current value, one "key = value" per line.
std::string dump_config(const PipelineConfig& cfg);

struct EditResult {
  RelationGraph graph;
  dsl::ConstraintProgram program;
  SearchResult search;
  DepthOrder order;
  RgbImage image;
};

/// Relations, state search, depth order and raster for one program.
EditResult run_edit(const Scene& scene, const dsl::ConstraintProgram& program, const PipelineConfig& cfg);

std::string read_text_file(const std::filesystem::path& file);

}  // namespace iconforge
