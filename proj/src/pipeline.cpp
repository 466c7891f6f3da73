#include "parcelpick/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "parcelpick/errors.hpp"
#include "parcelpick/random.hpp"

namespace parcelpick {

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Detect: return "Detect";
    case ActionKind::PickGrasp: return "PickGrasp";
    case ActionKind::PickSuction: return "PickSuction";
    case ActionKind::BarcodeCheck: return "BarcodeCheck";
    case ActionKind::Reverse: return "Reverse";
    case ActionKind::Place: return "Place";
    case ActionKind::Abort: return "Abort";
  }
  return "?";
}

std::string to_string(EndEffectorMode m) { return m == EndEffectorMode::Gripper ? "gripper" : "suction"; }

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Perceive: return "perceive";
    case Stage::Pick: return "pick";
    case Stage::BarcodeCheck: return "barcode_check";
    case Stage::Reverse: return "reverse";
    case Stage::Place: return "place";
    case Stage::Done: return "done";
  }
  return "?";
}

std::string action_trace(const std::vector<Action>& log) {
  std::string out;
  for (const Action& a : log) {
    if (!out.empty()) out += ' ';
    out += to_string(a.kind);
  }
  return out;
}

PipelineState make_initial_state(std::vector<SceneObject> objects, const CameraIntrinsics& k) {
  PipelineState s;
  s.camera = k;
  s.initial_count = static_cast<int>(objects.size());
  s.remaining = std::move(objects);
  return s;
}

GraspPlanResult plan_grasps(const ColorImage& color, const DepthImage& depth, const CameraIntrinsics& k,
                            const GraspPlanningConfig& cfg, const std::optional<BoundingBox>& roi, const Mask* mask) {
  GraspPlanResult r;
  r.candidates = sample_antipodal(depth, k, cfg.sampler, roi);
  if (mask)
    std::erase_if(r.candidates, [&](const GraspCandidate& g) { return !mask->test(g.center.u, g.center.v); });
  r.filter = filter_grasps(r.candidates, depth, color, cfg.region, cfg.thresholds);
  const AnalyticScorer scorer(cfg.scorer);
  std::vector<GraspScore> scores;
  for (const FilterRecord& rec : r.filter.records) {
    if (rec.out_of_bounds) continue;
    if (cfg.use_filter && !rec.verdict.passed()) continue;
    scores.push_back(scorer.score(r.candidates[rec.index], *rec.stats));
  }
  r.ranked = rank_grasps(std::move(scores));
  return r;
}

namespace {

void log_action(PipelineState& s, ActionKind kind, int target = -1, int plan = -1, bool success = true) {
  s.action_log.push_back({kind, target, plan, s.tick++, success});
}

double median_depth(const DepthImage& depth, const Mask& mask) {
  std::vector<double> d;
  for (int v = 0; v < depth.height(); ++v)
    for (int u = 0; u < depth.width(); ++u)
      if (mask.at(u, v) && depth.valid(u, v)) d.push_back(depth.at(u, v));
  if (d.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<long>(mid), d.end());
  return d[mid];
}

int dominant_object(const SceneTruth& truth, const Mask& mask) {
  std::map<int, long> votes;
  for (int v = 0; v < truth.height; ++v)
    for (int u = 0; u < truth.width; ++u)
      if (mask.at(u, v)) {
        const int id = truth.visible_at(u, v);
        if (id >= 0) ++votes[id];
      }
  int best = -1;
  long best_n = 0;
  for (const auto& [id, n] : votes)
    if (n > best_n) {
      best = id;
      best_n = n;
    }
  return best;
}

Mask detection_mask(const Detection& d, int w, int h) {
  if (d.mask) return *d.mask;
  Mask m(w, h);
  for (int v = d.bbox.min.v; v <= d.bbox.max.v; ++v)
    for (int u = d.bbox.min.u; u <= d.bbox.max.u; ++u) m.set(u, v);
  return m;
}

void remove_object(PipelineState& s, int id) {
  std::erase_if(s.remaining, [&](const SceneObject& o) { return o.id == id; });
}

void fail_attempt(PipelineState& s, int target) {
  if (s.retries == 0) {
    s.retries = 1;
    return;
  }
  s.retries = 0;
  log_action(s, ActionKind::Abort, target);
  if (target >= 0) {
    remove_object(s, target);
    s.aborted.push_back(target);
  }
}

void perceive(PipelineState& s, const PipelineConfig& cfg) {
  RenderOptions ropts = cfg.render;
  ropts.noise_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(s.tick));
  s.last_frame = render_scene(s.remaining, s.camera, ropts);
  const RenderedScene& frame = *s.last_frame;

  std::vector<Detection> dets;
  if (cfg.ground_truth_detector)
    dets = GroundTruthDetector(&frame.truth, cfg.detector.min_area).detect(frame.color, frame.depth);
  else
    dets = detect_packages(frame.color, frame.depth, cfg.detector);
  // A detection pass that finds nothing ends the run; it is logged only when
  // it is the first action, so a cleared table does not add a trailing entry.
  if (dets.empty()) {
    if (s.action_log.empty()) log_action(s, ActionKind::Detect);
    s.stage = Stage::Done;
    return;
  }
  log_action(s, ActionKind::Detect);

  const DepthImage depth = inpaint_invalid(frame.depth);
  const int w = depth.width();
  const int h = depth.height();
  std::size_t top = 0;
  double top_depth = std::numeric_limits<double>::infinity();
  std::vector<Mask> masks;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    masks.push_back(detection_mask(dets[i], w, h));
    const double md = median_depth(depth, masks.back());
    if (md < top_depth) {
      top_depth = md;
      top = i;
    }
  }
  const Detection& det = dets[top];
  const Mask& mask = masks[top];

  PlanRecord plan;
  plan.tick = s.tick;
  plan.target = dominant_object(frame.truth, mask);
  plan.detected_class = det.cls;
  plan.detection_bbox = det.bbox;
  try {
    if (det.cls == PackageClass::Bag) {
      GraspPlanningConfig gcfg = cfg.grasp;
      gcfg.sampler.rng_seed = derive_seed(cfg.seed ^ 0x5a5a5a5aULL, static_cast<std::uint64_t>(s.tick));
      const GraspPlanResult r =
          plan_grasps(frame.color, depth, s.camera, gcfg, det.bbox.dilated(cfg.roi_margin_px, w, h), &mask);
      plan.candidates = r.candidates.size();
      plan.filtered = cfg.grasp.use_filter ? r.filter.kept.size() : r.ranked.size();
      plan.grasp = select_best(r.ranked);
    } else {
      SuctionConfig scfg = cfg.suction;
      scfg.rng_seed = derive_seed(cfg.seed ^ 0xa5a5a5a5ULL, static_cast<std::uint64_t>(s.tick));
      plan.suction = sample_suction(depth, s.camera, det.bbox, scfg, &mask);
    }
  } catch (const NoGraspError& e) {
    plan.failure = e.what();
  } catch (const NoSuctionError& e) {
    plan.failure = e.what();
  }
  s.plans.push_back(plan);
  if (!plan.failure.empty()) {
    fail_attempt(s, plan.target);
    return;
  }
  s.pending_plan = s.plans.size() - 1;
  s.stage = Stage::Pick;
}

void pick(PipelineState& s, const PipelineConfig& cfg) {
  const PlanRecord& plan = s.plans.at(*s.pending_plan);
  const int plan_index = static_cast<int>(*s.pending_plan);
  s.pending_plan.reset();
  const bool grasp = plan.grasp.has_value();
  const Pixel at = grasp ? plan.grasp->candidate.center : plan.suction->pixel;
  const SceneTruth& truth = s.last_frame->truth;
  const int id = truth.visible_at(at.u, at.v);
  const ActionKind kind = grasp ? ActionKind::PickGrasp : ActionKind::PickSuction;
  s.end_effector_mode = grasp ? EndEffectorMode::Gripper : EndEffectorMode::Suction;

  Rng rng(derive_seed(cfg.seed ^ 0x3c3c3c3cULL, static_cast<std::uint64_t>(s.tick)));
  const bool slipped = cfg.pick_failure_probability > 0 && bernoulli(rng, cfg.pick_failure_probability);
  if (id < 0 || slipped) {
    log_action(s, kind, id, plan_index, false);
    s.stage = Stage::Perceive;
    fail_attempt(s, id >= 0 ? id : plan.target);
    return;
  }
  log_action(s, kind, id, plan_index, true);
  s.held = *truth.find(id);
  s.held_object = *truth.find_object(id);
  remove_object(s, id);
  s.retries = 0;
  s.stage = Stage::BarcodeCheck;
}

}  // namespace

PipelineState step(PipelineState s, const PipelineConfig& cfg) {
  switch (s.stage) {
    case Stage::Perceive:
      perceive(s, cfg);
      break;
    case Stage::Pick:
      pick(s, cfg);
      break;
    case Stage::BarcodeCheck: {
      const BarcodeObservation obs = OracleBarcodeObserver().observe(s.held ? &*s.held : nullptr);
      log_action(s, ActionKind::BarcodeCheck, s.held->id);
      s.stage = obs.present ? Stage::Place : Stage::Reverse;
      break;
    }
    case Stage::Reverse:
      if (!s.held) throw ProtocolError("reverse requested with nothing in the gripper");
      s.held->barcode_up = true;
      s.held_object->barcode_up = true;
      log_action(s, ActionKind::Reverse, s.held->id);
      s.stage = Stage::Place;
      break;
    case Stage::Place:
      if (!s.held) throw ProtocolError("place requested with nothing in the gripper");
      log_action(s, ActionKind::Place, s.held->id);
      s.placed.push_back(s.held->id);
      s.held.reset();
      s.held_object.reset();
      s.stage = Stage::Perceive;
      break;
    case Stage::Done:
      break;
  }
  return s;
}

PipelineRun run_pipeline(std::vector<SceneObject> objects, const CameraIntrinsics& k, const PipelineConfig& cfg,
                         const StepObserver& observer) {
  std::vector<SceneObject> initial = objects;
  PipelineRun run{make_initial_state(std::move(objects), k), {}};
  for (int i = 0; i < cfg.max_steps && !run.state.terminal(); ++i) {
    run.state = step(std::move(run.state), cfg);
    if (observer) observer(run.state);
  }

  PipelineReport& rep = run.report;
  for (const SceneObject& o : initial) {
    ObjectOutcome out{o.id, o.cls, "remaining", false};
    if (std::find(run.state.placed.begin(), run.state.placed.end(), o.id) != run.state.placed.end())
      out.outcome = "placed";
    else if (std::find(run.state.aborted.begin(), run.state.aborted.end(), o.id) != run.state.aborted.end())
      out.outcome = "aborted";
    for (const Action& a : run.state.action_log)
      if (a.kind == ActionKind::Reverse && a.target == o.id) out.reversed = true;
    rep.objects.push_back(out);
  }
  for (const Action& a : run.state.action_log) {
    if (a.kind == ActionKind::PickGrasp || a.kind == ActionKind::PickSuction) ++rep.picks_attempted;
    if (a.kind == ActionKind::Reverse) ++rep.reversals;
  }
  rep.all_placed = static_cast<int>(run.state.placed.size()) == run.state.initial_count;
  return run;
}

}  // namespace parcelpick
