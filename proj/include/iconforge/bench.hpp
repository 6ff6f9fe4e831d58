#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "iconforge/pipeline.hpp"
#include "iconforge/raster.hpp"
#include "iconforge/scene.hpp"

namespace iconforge {

/// 0.5 * (mean nearest-gt distance over pred + mean nearest-pred distance
/// over gt). Brute force over both point sets.
double chamfer(std::span<const Vec2> pred, std::span<const Vec2> gt);
double chamfer_relative(std::span<const Vec2> pred, std::span<const Vec2> gt, double gt_size);
double segment_size(const Segment& gt, SizeMode mode);
double chamfer_relative(const Segment& pred, const Segment& gt, SizeMode mode = SizeMode::BboxDiagonal);

struct SceneChamfer {
  double mean = 0.0;
  std::vector<int> segments;  // ids that were scored
  std::vector<double> values;
};

/// Mean relative chamfer over the segments edited in either scene (samples
/// differing from `source`); every segment when nothing was edited or no
/// source is given. Segment ids must pair up.
SceneChamfer scene_chamfer(const Scene& pred, const Scene& gt, const Scene* source = nullptr,
                           SizeMode mode = SizeMode::BboxDiagonal);

/// Mean over pixels and channels of the squared difference, values in [0, 255].
double image_mse(const RgbImage& a, const RgbImage& b);

struct BenchCase {
  std::string name;
  std::filesystem::path scene;
  std::filesystem::path program;  // or request
  std::string request;
  std::filesystem::path gt_motions;  // or gt_scene
  std::filesystem::path gt_scene;
  std::vector<std::string> tags;
};

/// One case per line: "case NAME key=value ..." with keys scene, program,
/// request, gt_motions, gt_scene, tags (comma separated). Relative paths
/// resolve against the manifest directory; '#' starts a comment.
std::vector<BenchCase> parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
std::vector<BenchCase> load_manifest(const std::filesystem::path& file);

struct CaseResult {
  std::string name;
  bool ok = false;
  std::string error;
  double cd = 0.0;
  double mse = 0.0;
  double score = 0.0;
  int solves = 0;
  double seconds = 0.0;
  std::string states;
  MotionMap motions;
};

struct BenchReport {
  std::vector<CaseResult> cases;
  double mean_cd = 0.0;
  double mean_mse = 0.0;
  int ok_count = 0;
};

enum class BenchMode { Program, Llm };

CaseResult run_case(const BenchCase& c, const PipelineConfig& cfg, BenchMode mode = BenchMode::Program);
BenchReport run_cases(const std::vector<BenchCase>& cases, const PipelineConfig& cfg,
                      BenchMode mode = BenchMode::Program);
BenchReport run_manifest(const std::filesystem::path& manifest, const PipelineConfig& cfg,
                         BenchMode mode = BenchMode::Program);

/// Aligned text table (one row per case, then the means).
std::string report_table(const BenchReport& report);
std::string report_json(const BenchReport& report);

}  // namespace iconforge
