#include "iconforge/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "iconforge/errors.hpp"

namespace iconforge {

std::string_view motion_state_name(MotionState s) {
  switch (s) {
    case MotionState::N: return "N";
    case MotionState::T: return "T";
    case MotionState::TR: return "TR";
    case MotionState::TS: return "TS";
    default: return "TRS";
  }
}

std::optional<MotionState> parse_motion_state(std::string_view name) {
  for (MotionState s : {MotionState::N, MotionState::T, MotionState::TR, MotionState::TS, MotionState::TRS}) {
    if (motion_state_name(s) == name) return s;
  }
  return std::nullopt;
}

bool has_rotation(MotionState s) { return s == MotionState::TR || s == MotionState::TRS; }
bool has_scale(MotionState s) { return s == MotionState::TS || s == MotionState::TRS; }

int dof_count(MotionState s) {
  if (s == MotionState::N) return 0;
  return 2 + (has_rotation(s) ? 1 : 0) + (has_scale(s) ? 2 : 0);
}

SolveResult solve(const Scene& scene, const std::vector<dsl::Node>& constraints, const MotionStates& states,
                  const SolveConfig& cfg, const MotionMap* init) {
  if (cfg.max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (cfg.lr0 <= 0) throw ValidationError("lr0 must be positive");

  std::vector<ParamRef> params;
  for (const auto& [id, state] : states) {
    if (!scene.has_segment(id)) throw ValidationError("motion state for unknown segment seg" + std::to_string(id));
    if (state == MotionState::N) continue;
    params.push_back({id, Slot::Tx});
    params.push_back({id, Slot::Ty});
    if (has_rotation(state)) params.push_back({id, Slot::Theta});
    if (has_scale(state)) {
      params.push_back({id, Slot::Sx});
      params.push_back({id, Slot::Sy});
    }
  }

  // x holds tx, ty, theta and log(sx), log(sy).
  const std::size_t n = params.size();
  std::vector<double> x(n, 0.0);
  MotionMap base;
  for (const Segment& seg : scene.segments) base[seg.id] = identity_motion(seg);
  if (init) {
    for (const ParamRef& p : params) base[p.segment] = motion_for(*init, scene.segment(p.segment));
    for (std::size_t k = 0; k < n; ++k) {
      const MotionParams& m = base[params[k].segment];
      switch (params[k].slot) {
        case Slot::Tx: x[k] = m.tx; break;
        case Slot::Ty: x[k] = m.ty; break;
        case Slot::Theta: x[k] = m.theta_deg; break;
        case Slot::Sx: x[k] = std::log(m.sx); break;
        case Slot::Sy: x[k] = std::log(m.sy); break;
      }
    }
  }
  const double lo = std::log(MotionParams::kMinScale);
  const double hi = std::log(MotionParams::kMaxScale);
  const auto motions_of = [&](const std::vector<double>& v) {
    MotionMap m;
    for (const auto& [id, state] : states) {
      if (state != MotionState::N) m[id] = identity_motion(scene.segment(id));
    }
    for (std::size_t k = 0; k < n; ++k) {
      MotionParams& mp = m[params[k].segment];
      switch (params[k].slot) {
        case Slot::Tx: mp.tx = v[k]; break;
        case Slot::Ty: mp.ty = v[k]; break;
        case Slot::Theta: mp.theta_deg = v[k]; break;
        case Slot::Sx: mp.sx = std::exp(v[k]); break;
        case Slot::Sy: mp.sy = std::exp(v[k]); break;
      }
    }
    return m;
  };

  SolveResult result;
  if (constraints.empty()) {
    result.motions = motions_of(x);
    return result;
  }

  Evaluator ev(scene, params, cfg.eval);
  std::vector<double> m1(n, 0.0), m2(n, 0.0);
  std::vector<double> best_x = x;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_history;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const MotionMap current = motions_of(x);
    ev.set_motions(current);
    const DiffScalar loss = ev.total_loss(constraints);
    ++result.iters_used;
    if (cfg.keep_trace) result.trace.push_back(loss.value);
    if (loss.value < best) {
      best = loss.value;
      best_x = x;
    }
    best_history.push_back(best);
    if (best < cfg.eps_conv || n == 0) break;
    const double lr = std::max(cfg.lr0 * std::pow(cfg.lr_decay, it), cfg.lr_floor);
    // Adam oscillates around kinks while the step is large, so a stalled best
    // only ends the run once the step has decayed.
    if (lr <= cfg.stall_lr_fraction * cfg.lr0 && static_cast<int>(best_history.size()) > cfg.stall_window) {
      const double then = best_history[best_history.size() - 1 - static_cast<std::size_t>(cfg.stall_window)];
      if (then - best <= cfg.stall_rel * std::max(then, 1e-12)) break;
    }
    const double t = it + 1;
    for (std::size_t k = 0; k < n; ++k) {
      double g = loss.grad[k];
      double mult = cfg.lr_translation;
      if (params[k].slot == Slot::Theta) mult = cfg.lr_rotation;
      if (params[k].slot == Slot::Sx || params[k].slot == Slot::Sy) {
        g *= std::exp(x[k]);  // d/dlog(s) = s d/ds
        mult = cfg.lr_log_scale;
      }
      m1[k] = cfg.beta1 * m1[k] + (1 - cfg.beta1) * g;
      m2[k] = cfg.beta2 * m2[k] + (1 - cfg.beta2) * g * g;
      const double mh = m1[k] / (1 - std::pow(cfg.beta1, t));
      const double vh = m2[k] / (1 - std::pow(cfg.beta2, t));
      x[k] -= lr * mult * mh / (std::sqrt(vh) + cfg.adam_eps);
      if (params[k].slot == Slot::Sx || params[k].slot == Slot::Sy) x[k] = std::clamp(x[k], lo, hi);
    }
  }
  result.score = best;
  result.motions = motions_of(best_x);
  result.unsatisfiable = n == 0 && best > cfg.eps_conv;
  return result;
}

std::string dump_motions(const Scene& scene, const MotionMap& motions) {
  nlohmann::json doc;
  doc["motions"] = nlohmann::json::array();
  for (const Segment& seg : scene.segments) {
    const MotionParams m = motion_for(motions, seg);
    doc["motions"].push_back({{"id", seg.id},
                              {"tx", m.tx},
                              {"ty", m.ty},
                              {"theta_deg", m.theta_deg},
                              {"sx", m.sx},
                              {"sy", m.sy},
                              {"pivot", {m.pivot.x, m.pivot.y}}});
  }
  return doc.dump(2) + "\n";
}

MotionMap parse_motions(std::string_view document, const Scene& scene) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed motions document: ") + e.what());
  }
  if (!doc.contains("motions") || !doc["motions"].is_array()) throw ParseError("motions: expected array");
  MotionMap out;
  for (const auto& m : doc["motions"]) {
    if (!m.contains("id") || !m["id"].is_number_integer()) throw ParseError("motions[].id: expected integer");
    const int id = m["id"].get<int>();
    if (!scene.has_segment(id)) throw ValidationError("motion for unknown segment seg" + std::to_string(id));
    MotionParams p = identity_motion(scene.segment(id));
    p.tx = m.value("tx", 0.0);
    p.ty = m.value("ty", 0.0);
    p.theta_deg = m.value("theta_deg", 0.0);
    p.sx = m.value("sx", 1.0);
    p.sy = m.value("sy", 1.0);
    if (m.contains("pivot")) p.pivot = {m["pivot"][0].get<double>(), m["pivot"][1].get<double>()};
    out[id] = p;
  }
  return out;
}

MotionMap load_motions(const std::string& file, const Scene& scene) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open motions file " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_motions(ss.str(), scene);
}

}  // namespace iconforge
