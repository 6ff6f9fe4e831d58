#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iconforge/dsl.hpp"
#include "iconforge/eval.hpp"
#include "iconforge/scene.hpp"

namespace iconforge {

/// Which affine degrees of freedom a segment may use.
enum class MotionState { N, T, TR, TS, TRS };

std::string_view motion_state_name(MotionState s);
std::optional<MotionState> parse_motion_state(std::string_view name);
bool has_rotation(MotionState s);
bool has_scale(MotionState s);
int dof_count(MotionState s);

using MotionStates = std::map<int, MotionState>;

struct SolveConfig {
  int max_iters = 150;
  double lr0 = 10.0;
  double lr_decay = 0.97;
  double lr_floor = 0.05;
  /// Step multipliers per parameter group (scale is optimized as log(s)).
  double lr_translation = 1.0;
  double lr_rotation = 1.0;
  double lr_log_scale = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double eps_conv = 1e-3;
  double stall_rel = 1e-6;
  int stall_window = 20;
  /// The stall rule applies once lr <= stall_lr_fraction * lr0.
  double stall_lr_fraction = 0.01;
  bool keep_trace = false;
  EvalConfig eval;
};

struct SolveResult {
  MotionMap motions;
  double score = 0.0;
  int iters_used = 0;
  bool unsatisfiable = false;  // no free parameters and the loss is above eps_conv
  std::vector<double> trace;
};

/// Adam on the mean violation over the free parameters of `states`,
/// starting from identity (or from `init` where given). Returns the best
/// iterate.
SolveResult solve(const Scene& scene, const std::vector<dsl::Node>& constraints, const MotionStates& states,
                  const SolveConfig& cfg = {}, const MotionMap* init = nullptr);

std::string dump_motions(const Scene& scene, const MotionMap& motions);
MotionMap parse_motions(std::string_view document, const Scene& scene);
MotionMap load_motions(const std::string& file, const Scene& scene);

}  // namespace iconforge
