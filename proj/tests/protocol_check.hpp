#pragma once

#include <string>
#include <vector>

#include "parcelpick/pipeline.hpp"

namespace parcelpick::testing {

// Walks an action log against the pick-check-place grammar:
//   cycle := Detect ( Pick+ BarcodeCheck [Reverse] Place | Pick- [Abort] | [Abort] )
// where Pick+ / Pick- are successful / failed picks. A lone Detect is the
// whole log of an empty table. Returns an empty string when the log is valid.
inline std::string check_grammar(const std::vector<Action>& log) {
  auto is_pick = [](ActionKind k) { return k == ActionKind::PickGrasp || k == ActionKind::PickSuction; };
  std::size_t i = 0;
  if (log.size() == 1 && log[0].kind == ActionKind::Detect) return {};
  while (i < log.size()) {
    if (log[i].kind != ActionKind::Detect) return "expected Detect at " + std::to_string(i);
    ++i;
    if (i == log.size()) return "run ends on Detect";
    if (is_pick(log[i].kind)) {
      const int target = log[i].target;
      if (!log[i].success) {
        ++i;
        if (i < log.size() && log[i].kind == ActionKind::Abort) ++i;
        continue;
      }
      ++i;
      if (i == log.size() || log[i].kind != ActionKind::BarcodeCheck || log[i].target != target)
        return "expected BarcodeCheck at " + std::to_string(i);
      ++i;
      if (i < log.size() && log[i].kind == ActionKind::Reverse) {
        if (log[i].target != target) return "Reverse on another object at " + std::to_string(i);
        ++i;
      }
      if (i == log.size() || log[i].kind != ActionKind::Place || log[i].target != target)
        return "expected Place at " + std::to_string(i);
      ++i;
    } else if (log[i].kind == ActionKind::Abort) {
      ++i;
    }
  }
  return {};
}

// Gripper for bags, suction for envelopes, on every pick: by the detected
// class and by the ground-truth class of the picked object.
inline bool mode_matches_class(const PipelineRun& run, const std::vector<SceneObject>& objects) {
  for (const Action& a : run.state.action_log) {
    if (a.kind != ActionKind::PickGrasp && a.kind != ActionKind::PickSuction) continue;
    const PackageClass want = a.kind == ActionKind::PickGrasp ? PackageClass::Bag : PackageClass::Envelope;
    if (a.plan < 0 || run.state.plans.at(static_cast<std::size_t>(a.plan)).detected_class != want) return false;
    if (!a.success) continue;
    for (const SceneObject& o : objects)
      if (o.id == a.target && o.cls != want) return false;
  }
  return true;
}

// One Reverse per placed barcode-down object and none for the others.
inline bool reversals_match(const PipelineRun& run, const std::vector<SceneObject>& objects) {
  for (const SceneObject& o : objects) {
    int reversals = 0;
    bool placed = false;
    for (const Action& a : run.state.action_log) {
      reversals += a.kind == ActionKind::Reverse && a.target == o.id;
      placed = placed || (a.kind == ActionKind::Place && a.target == o.id);
    }
    if (reversals != (placed && !o.barcode_up ? 1 : 0)) return false;
  }
  return true;
}

}  // namespace parcelpick::testing
