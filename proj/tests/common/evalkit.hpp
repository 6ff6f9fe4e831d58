#pragma once

#include <string>
#include <vector>

#include "iconforge/dsl.hpp"
#include "iconforge/eval.hpp"

namespace iconforge::testing {

inline std::vector<ParamRef> all_params(const std::vector<int>& segments) {
  std::vector<ParamRef> out;
  for (int s : segments) {
    for (Slot slot : {Slot::Tx, Slot::Ty, Slot::Theta, Slot::Sx, Slot::Sy}) out.push_back({s, slot});
  }
  return out;
}

inline double& slot_ref(MotionParams& m, Slot s) {
  switch (s) {
    case Slot::Tx: return m.tx;
    case Slot::Ty: return m.ty;
    case Slot::Theta: return m.theta_deg;
    case Slot::Sx: return m.sx;
    default: return m.sy;
  }
}

inline dsl::Node constraint(const std::string& text) { return dsl::parse(text).constraints.at(0); }

inline DiffScalar eval_at(const Scene& scene, const std::string& text, const MotionMap& motions,
                          const std::vector<ParamRef>& params, EvalConfig cfg = {}) {
  Evaluator ev(scene, params, cfg);
  ev.set_motions(motions);
  return ev.eval(constraint(text));
}

}  // namespace iconforge::testing
