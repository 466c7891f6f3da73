#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "parcelpick/detection.hpp"
#include "parcelpick/grasp_filter.hpp"
#include "parcelpick/ranking.hpp"
#include "parcelpick/sampling.hpp"
#include "parcelpick/suction.hpp"
#include "parcelpick/synth.hpp"

namespace parcelpick {

enum class ActionKind { Detect, PickGrasp, PickSuction, BarcodeCheck, Reverse, Place, Abort };
enum class EndEffectorMode { Gripper, Suction };

std::string to_string(ActionKind k);
std::string to_string(EndEffectorMode m);

struct Action {
  ActionKind kind = ActionKind::Detect;
  int target = -1;   // object id, -1 when not applicable
  int plan = -1;     // index into PipelineState::plans for picks
  long tick = 0;
  bool success = true;
};

/// What perception produced for one pick attempt.
struct PlanRecord {
  long tick = 0;
  int target = -1;  // ground-truth object under the chosen detection
  PackageClass detected_class = PackageClass::Bag;
  BoundingBox detection_bbox;
  std::size_t candidates = 0;  // raw antipodal candidates
  std::size_t filtered = 0;    // survivors of the filter (or raw count when disabled)
  std::optional<GraspScore> grasp;
  std::optional<SuctionCandidate> suction;
  std::string failure;  // empty on success
};

struct GraspPlanningConfig {
  SamplerConfig sampler;
  RegionGeometry region;
  FilterThresholds thresholds;
  ScorerConfig scorer;
  bool use_filter = true;
};

struct PipelineConfig {
  GraspPlanningConfig grasp;
  SuctionConfig suction;
  DetectorConfig detector;
  RenderOptions render;
  bool ground_truth_detector = false;
  double pick_failure_probability = 0.0;  // 0 is oracle mode
  std::uint64_t seed = 0;
  int max_steps = 1000;
  int roi_margin_px = 12;
};

enum class Stage { Perceive, Pick, BarcodeCheck, Reverse, Place, Done };
std::string to_string(Stage s);

struct PipelineState {
  CameraIntrinsics camera;
  std::vector<SceneObject> remaining;
  int initial_count = 0;
  std::optional<ObjectTruth> held;
  std::optional<SceneObject> held_object;
  EndEffectorMode end_effector_mode = EndEffectorMode::Gripper;
  std::vector<Action> action_log;
  std::vector<PlanRecord> plans;
  std::vector<int> placed;
  std::vector<int> aborted;
  Stage stage = Stage::Perceive;
  long tick = 0;
  int retries = 0;
  std::optional<RenderedScene> last_frame;
  std::optional<std::size_t> pending_plan;

  bool terminal() const { return stage == Stage::Done; }
};

PipelineState make_initial_state(std::vector<SceneObject> objects, const CameraIntrinsics& k);

struct GraspPlanResult {
  std::vector<GraspCandidate> candidates;
  FilterResult filter;                 // evaluated over `candidates`
  std::vector<GraspScore> ranked;      // best first
};

/// Samples, filters and ranks grasps on one frame. `roi` restricts the edge
/// pixels, `mask` the grasp centers. Candidates whose region leaves the
/// image are never ranked.
GraspPlanResult plan_grasps(const ColorImage& color, const DepthImage& depth, const CameraIntrinsics& k,
                            const GraspPlanningConfig& cfg, const std::optional<BoundingBox>& roi = std::nullopt,
                            const Mask* mask = nullptr);

/// Advances the protocol by one stage.
PipelineState step(PipelineState state, const PipelineConfig& cfg);

struct ObjectOutcome {
  int id = 0;
  PackageClass cls = PackageClass::Bag;
  std::string outcome;  // "placed", "aborted" or "remaining"
  bool reversed = false;
};

struct PipelineReport {
  std::vector<ObjectOutcome> objects;
  int picks_attempted = 0;
  int reversals = 0;
  bool all_placed = false;
};

struct PipelineRun {
  PipelineState state;
  PipelineReport report;
};

using StepObserver = std::function<void(const PipelineState&)>;

/// Steps until the terminal stage (or cfg.max_steps).
PipelineRun run_pipeline(std::vector<SceneObject> objects, const CameraIntrinsics& k, const PipelineConfig& cfg,
                         const StepObserver& observer = {});

/// Action kinds joined by spaces, e.g. "Detect PickGrasp BarcodeCheck Place".
std::string action_trace(const std::vector<Action>& log);

}  // namespace parcelpick
