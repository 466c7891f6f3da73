#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "parcelpick/detection.hpp"
#include "parcelpick/errors.hpp"
#include "parcelpick/json_io.hpp"
#include "parcelpick/overlay.hpp"
#include "parcelpick/pipeline.hpp"
#include "parcelpick/random.hpp"
#include "parcelpick/study.hpp"

namespace fs = std::filesystem;
using namespace parcelpick;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNoPlan = 3;
constexpr int kExitAbort = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SeedOption {
  std::uint64_t value = 0;
  CLI::Option* opt = nullptr;

  void add(CLI::App* app) { opt = app->add_option("--seed", value, "RNG seed (drawn from entropy when omitted)"); }
  std::uint64_t resolve(const char* command) {
    if (opt->count() == 0) {
      std::random_device rd;
      value = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      std::cerr << command << ": seed " << value << '\n';
    }
    return value;
  }
};

// Flags that override the config file; each is applied only when given.
struct PlanningFlags {
  std::string config_path;
  bool no_filter = false;
  std::array<double, 6> eps{};
  std::array<CLI::Option*, 6> eps_opts{};
  int max_candidates = 0;
  CLI::Option* max_candidates_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app->add_flag("--no-filter", no_filter, "rank raw antipodal candidates without the region filter");
    for (int i = 0; i < 6; ++i)
      eps_opts[i] = app->add_option("--eps" + std::to_string(i + 1), eps[i], "filter threshold override");
    max_candidates_opt = app->add_option("--max-candidates", max_candidates, "antipodal candidate budget");
  }

  PipelineConfig resolve(const PipelineConfig& base) const {
    PipelineConfig cfg = base;
    if (!config_path.empty()) apply_config(read_json_file(config_path), cfg);
    double* fields[6] = {&cfg.grasp.thresholds.eps1, &cfg.grasp.thresholds.eps2, &cfg.grasp.thresholds.eps3,
                         &cfg.grasp.thresholds.eps4, &cfg.grasp.thresholds.eps5, &cfg.grasp.thresholds.eps6};
    for (int i = 0; i < 6; ++i)
      if (eps_opts[i]->count()) *fields[i] = eps[i];
    if (max_candidates_opt->count()) cfg.grasp.sampler.max_candidates = max_candidates;
    if (no_filter) cfg.grasp.use_filter = false;
    cfg.grasp.thresholds.validate();
    cfg.grasp.sampler.validate();
    return cfg;
  }
};

struct Bundle {
  SceneSpec spec;
  ColorImage color;
  DepthImage depth;
};

Bundle load_bundle(const fs::path& dir) {
  Bundle b;
  b.spec = scene_spec_from_json(read_json_file(dir / "scene.json"));
  const RgbdPair pair = load_rgbd(dir / "color.png", dir / "depth.png");
  b.color = pair.color;
  b.depth = pair.depth;
  if (b.depth.width() != b.spec.camera.width || b.depth.height() != b.spec.camera.height)
    throw RegistrationError("image size does not match the camera in scene.json");
  return b;
}

void write_bundle(const fs::path& dir, const SceneSpec& spec) {
  fs::create_directories(dir);
  const RenderedScene scene = render_scene(spec.objects, spec.camera, spec.render);
  save_color_png(scene.color, dir / "color.png");
  save_depth_png(scene.depth, dir / "depth.png");
  write_json_file(to_json(spec), dir / "scene.json");
  write_json_file(to_json(scene.truth), dir / "truth.json");
}

// --- gen-scene ----------------------------------------------------------------

struct GenSceneArgs {
  int bags = 0;
  int envelopes = 0;
  SeedOption seed;
  fs::path out;
  double noise = 0.0015;
  double table_depth = 1.0;
  int count = 1;
  std::string camera_path;
};

int cmd_gen_scene(GenSceneArgs& a) {
  const std::uint64_t seed = a.seed.resolve("gen-scene");
  if (a.count < 1) throw UsageError("--count must be >= 1");
  CameraIntrinsics k;
  if (!a.camera_path.empty()) k = load_intrinsics_json(a.camera_path);
  RandomSceneOptions ropts;
  ropts.table_depth = a.table_depth;

  auto make_spec = [&](std::uint64_t s) {
    SceneSpec spec;
    spec.camera = k;
    spec.render.table_depth = a.table_depth;
    spec.render.noise_sigma = a.noise;
    spec.render.noise_seed = derive_seed(s, 1);
    spec.objects = random_scene(a.bags, a.envelopes, s, k, ropts);
    return spec;
  };

  if (a.count == 1) {
    write_bundle(a.out, make_spec(seed));
    return kExitOk;
  }
  Json entries = Json::array();
  for (int i = 0; i < a.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d", i);
    write_bundle(a.out / name, make_spec(scene_seed(seed, i)));
    const std::string n = name;
    entries.push_back({{"scene", n + "/scene.json"}, {"color", n + "/color.png"}, {"depth", n + "/depth.png"}});
  }
  write_json_file({{"seed", seed}, {"scenes", entries}}, a.out / "manifest.json");
  return kExitOk;
}

// --- plan-grasp ---------------------------------------------------------------

struct PlanGraspArgs {
  fs::path in;
  fs::path out;
  SeedOption seed;
  PlanningFlags flags;
};

int cmd_plan_grasp(PlanGraspArgs& a) {
  const std::uint64_t seed = a.seed.resolve("plan-grasp");
  const Bundle b = load_bundle(a.in);
  PipelineConfig cfg = a.flags.resolve({});
  cfg.grasp.sampler.rng_seed = seed;
  const fs::path out = a.out.empty() ? a.in : a.out;
  fs::create_directories(out);

  const DepthImage depth = inpaint_invalid(b.depth);
  const GraspPlanResult r = plan_grasps(b.color, depth, b.spec.camera, cfg.grasp);
  Json j = grasp_plan_to_json(r, cfg.grasp);
  j["seed"] = seed;
  write_json_file(j, out / "plans.json");

  OverlaySpec ov{b.color, {}};
  if (cfg.grasp.use_filter) {
    for (const FilterRecord& rec : r.filter.records)
      if (!rec.out_of_bounds && !rec.verdict.passed()) ov.glyphs.push_back(GraspGlyph{r.candidates[rec.index], kFailColor});
    for (const GraspCandidate& g : r.filter.kept) ov.glyphs.push_back(GraspGlyph{g, kPassColor});
  } else {
    for (const GraspScore& s : r.ranked) ov.glyphs.push_back(GraspGlyph{s.candidate, kPassColor});
  }
  if (!r.ranked.empty()) ov.glyphs.push_back(GraspGlyph{r.ranked.front().candidate, kSelectedColor});
  save_color_png(render_overlay(ov), out / "overlay.png");

  if (r.ranked.empty()) {
    const auto mv = r.filter.most_violated();
    const Json diag = {{"error", "no_grasp"},
                       {"candidates", r.candidates.size()},
                       {"most_violated", mv ? Json(kConditionNames[*mv]) : Json(nullptr)}};
    std::cout << diag.dump() << '\n';
    return kExitNoPlan;
  }
  return kExitOk;
}

// --- plan-suction -------------------------------------------------------------

struct PlanSuctionArgs {
  fs::path in;
  fs::path out;
  SeedOption seed;
  std::string config_path;
  std::vector<int> bbox;
};

int cmd_plan_suction(PlanSuctionArgs& a) {
  const std::uint64_t seed = a.seed.resolve("plan-suction");
  const Bundle b = load_bundle(a.in);
  PipelineConfig cfg;
  if (!a.config_path.empty()) apply_config(read_json_file(a.config_path), cfg);
  cfg.suction.rng_seed = seed;
  const fs::path out = a.out.empty() ? a.in : a.out;
  fs::create_directories(out);

  BoundingBox box;
  std::optional<Mask> mask;
  std::string source = "bbox";
  if (!a.bbox.empty()) {
    if (a.bbox.size() != 4) throw UsageError("--bbox takes four integers: u0 v0 u1 v1");
    box = {{a.bbox[0], a.bbox[1]}, {a.bbox[2], a.bbox[3]}};
  } else {
    const auto dets = detect_packages(b.color, b.depth, cfg.detector);
    const Detection* pick = nullptr;
    for (const Detection& d : dets)
      if (!pick && d.cls == PackageClass::Envelope) pick = &d;
    if (!pick && !dets.empty()) pick = &dets.front();
    if (!pick) {
      std::cout << Json{{"error", "no_detection"}}.dump() << '\n';
      return kExitNoPlan;
    }
    box = pick->bbox;
    mask = pick->mask;
    source = "detection";
  }

  const DepthImage depth = inpaint_invalid(b.depth);
  Json j = {{"seed", seed}, {"bbox", to_json(box)}, {"bbox_source", source}};
  OverlaySpec ov{b.color, {BoxGlyph{box, kBoxColor}}};
  int code = kExitOk;
  try {
    const SuctionCandidate s = sample_suction(depth, b.spec.camera, box, cfg.suction, mask ? &*mask : nullptr);
    j["plan"] = to_json(s);
    ov.glyphs.push_back(SuctionGlyph{s, 7, kSelectedColor});
  } catch (const NoSuctionError& e) {
    j["plan"] = nullptr;
    std::cout << Json{{"error", "no_suction"}, {"message", e.what()}}.dump() << '\n';
    code = kExitNoPlan;
  }
  write_json_file(j, out / "suction.json");
  save_color_png(render_overlay(ov), out / "overlay.png");
  return code;
}

// --- detect -------------------------------------------------------------------

struct DetectArgs {
  fs::path in;
  fs::path out;
  std::string config_path;
};

int cmd_detect(DetectArgs& a) {
  const Bundle b = load_bundle(a.in);
  PipelineConfig cfg;
  if (!a.config_path.empty()) apply_config(read_json_file(a.config_path), cfg);
  const fs::path out = a.out.empty() ? a.in : a.out;
  fs::create_directories(out);
  const auto dets = detect_packages(b.color, b.depth, cfg.detector);
  write_json_file(detections_to_json(dets), out / "detections.json");
  OverlaySpec ov{b.color, {}};
  for (const Detection& d : dets)
    ov.glyphs.push_back(BoxGlyph{d.bbox, d.cls == PackageClass::Bag ? kBoxColor : kSelectedColor});
  save_color_png(render_overlay(ov), out / "overlay.png");
  return kExitOk;
}

// --- run-pipeline -------------------------------------------------------------

struct RunPipelineArgs {
  fs::path in;
  fs::path out;
  SeedOption seed;
  PlanningFlags flags;
  int bags = 0;
  int envelopes = 0;
  std::uint64_t scene_seed = 0;
  bool ground_truth_detector = false;
  double pick_failure = 0;
  CLI::Option* pick_failure_opt = nullptr;
  bool no_frames = false;
};

int cmd_run_pipeline(RunPipelineArgs& a) {
  const std::uint64_t seed = a.seed.resolve("run-pipeline");
  SceneSpec spec;
  if (!a.in.empty()) {
    spec = scene_spec_from_json(read_json_file(a.in / "scene.json"));
  } else {
    spec.objects = random_scene(a.bags, a.envelopes, a.scene_seed, spec.camera);
  }
  PipelineConfig base;
  base.render = spec.render;
  PipelineConfig cfg = a.flags.resolve(base);
  cfg.seed = seed;
  if (a.ground_truth_detector) cfg.ground_truth_detector = true;
  if (a.pick_failure_opt->count()) cfg.pick_failure_probability = a.pick_failure;
  if (!(cfg.pick_failure_probability >= 0 && cfg.pick_failure_probability <= 1))
    throw UsageError("--pick-failure must be in [0, 1]");

  const fs::path out = a.out.empty() ? (a.in.empty() ? fs::path("run") : a.in) : a.out;
  fs::create_directories(out);
  if (!a.no_frames) fs::create_directories(out / "frames");

  std::size_t frames = 0;
  std::size_t seen_plans = 0;
  std::size_t seen_detects = 0;
  auto observer = [&](const PipelineState& s) {
    std::size_t detects = 0;
    for (const Action& act : s.action_log) detects += act.kind == ActionKind::Detect;
    if (a.no_frames || detects == seen_detects || !s.last_frame) return;
    seen_detects = detects;
    OverlaySpec ov{s.last_frame->color, {}};
    for (; seen_plans < s.plans.size(); ++seen_plans) {
      const PlanRecord& p = s.plans[seen_plans];
      const bool ok = p.failure.empty();
      ov.glyphs.push_back(BoxGlyph{p.detection_bbox, ok ? kBoxColor : kFailColor});
      if (p.grasp) ov.glyphs.push_back(GraspGlyph{p.grasp->candidate, kSelectedColor});
      if (p.suction) ov.glyphs.push_back(SuctionGlyph{*p.suction, 7, kSelectedColor});
    }
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.png", frames++);
    save_color_png(render_overlay(ov), out / "frames" / name);
  };

  const PipelineRun run = run_pipeline(spec.objects, spec.camera, cfg, observer);
  Json j = to_json(run);
  j["seed"] = seed;
  write_json_file(j, out / "report.json");
  return run.report.all_placed ? kExitOk : kExitAbort;
}

// --- compare ------------------------------------------------------------------

struct CompareArgs {
  int scenes = 50;
  int bags = 1;
  int top_k = 10;
  SeedOption seed;
  PlanningFlags flags;
  fs::path out;
};

int cmd_compare(CompareArgs& a) {
  StudyOptions opts;
  opts.seed = a.seed.resolve("compare");
  opts.scenes = a.scenes;
  opts.bags_per_scene = a.bags;
  opts.top_k = a.top_k;
  const PipelineConfig cfg = a.flags.resolve({});
  opts.grasp = cfg.grasp;
  opts.render = cfg.render;
  const FilterComparison c = compare_filter(opts);

  Json per = Json::array();
  for (const SceneStudy& s : c.scenes)
    per.push_back({{"scene_seed", s.scene_seed},
                   {"candidates", s.candidates},
                   {"filtered", s.filtered},
                   {"filtered_in_corner", s.filtered_in_corner},
                   {"filtered_on_lump", s.filtered_on_lump},
                   {"raw_top", s.raw_top},
                   {"raw_top_on_lump", s.raw_top_on_lump}});
  const Json j = {{"seed", opts.seed},
                  {"top_k", opts.top_k},
                  {"filtered", c.filtered},
                  {"filtered_corner_rate", c.corner_rate()},
                  {"filtered_lump_rate", c.lump_rate()},
                  {"raw_top", c.raw_top},
                  {"raw_top_lump_rate", c.raw_lump_rate()},
                  {"scenes", per}};
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_json_file(j, a.out / "compare.json");
  }
  std::printf("filtered grasps: %zu, in corner regions: %.1f%%, over lump: %.1f%%\n", c.filtered,
              100 * c.corner_rate(), 100 * c.lump_rate());
  std::printf("unfiltered top-%d: %zu, over lump: %.1f%%\n", opts.top_k, c.raw_top, 100 * c.raw_lump_rate());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grasp and suction planning for parcels on a table, with a synthetic scene generator."};
  app.require_subcommand(1);

  GenSceneArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-scene", "render a random scene bundle");
  gen_cmd->add_option("--bags", gen.bags, "number of bags")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--envelopes", gen.envelopes, "number of envelopes")->check(CLI::NonNegativeNumber);
  gen.seed.add(gen_cmd);
  gen_cmd->add_option("-o,--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--noise", gen.noise, "depth noise sigma, m")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--table-depth", gen.table_depth, "table distance, m")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--count", gen.count, "number of scenes; > 1 writes a corpus with manifest.json");
  gen_cmd->add_option("--camera", gen.camera_path, "intrinsics JSON")->check(CLI::ExistingFile);

  PlanGraspArgs pg;
  auto* pg_cmd = app.add_subcommand("plan-grasp", "plan a two-finger grasp on a bundle");
  pg_cmd->add_option("-i,--in", pg.in, "scene bundle directory")->required()->check(CLI::ExistingDirectory);
  pg_cmd->add_option("-o,--out", pg.out, "output directory (default: the bundle)");
  pg.seed.add(pg_cmd);
  pg.flags.add(pg_cmd);

  PlanSuctionArgs ps;
  auto* ps_cmd = app.add_subcommand("plan-suction", "plan a suction point on a bundle");
  ps_cmd->add_option("-i,--in", ps.in, "scene bundle directory")->required()->check(CLI::ExistingDirectory);
  ps_cmd->add_option("-o,--out", ps.out, "output directory (default: the bundle)");
  ps.seed.add(ps_cmd);
  ps_cmd->add_option("--config", ps.config_path, "JSON config file")->check(CLI::ExistingFile);
  ps_cmd->add_option("--bbox", ps.bbox, "u0 v0 u1 v1 (default: first detected envelope)")->expected(4);

  DetectArgs det;
  auto* det_cmd = app.add_subcommand("detect", "detect and classify packages in a bundle");
  det_cmd->add_option("-i,--in", det.in, "scene bundle directory")->required()->check(CLI::ExistingDirectory);
  det_cmd->add_option("-o,--out", det.out, "output directory (default: the bundle)");
  det_cmd->add_option("--config", det.config_path, "JSON config file")->check(CLI::ExistingFile);

  RunPipelineArgs rp;
  auto* rp_cmd = app.add_subcommand("run-pipeline", "run pick, barcode check and place until the table is clear");
  auto* rp_in = rp_cmd->add_option("-i,--in", rp.in, "scene bundle directory")->check(CLI::ExistingDirectory);
  rp_cmd->add_option("-o,--out", rp.out, "output directory (default: the bundle, or ./run)");
  rp.seed.add(rp_cmd);
  rp.flags.add(rp_cmd);
  auto* rp_bags = rp_cmd->add_option("--bags", rp.bags, "generate a scene with this many bags")
                      ->check(CLI::NonNegativeNumber);
  auto* rp_env = rp_cmd->add_option("--envelopes", rp.envelopes, "generate a scene with this many envelopes")
                     ->check(CLI::NonNegativeNumber);
  rp_cmd->add_option("--scene-seed", rp.scene_seed, "seed of the generated scene");
  rp_in->excludes(rp_bags)->excludes(rp_env);
  rp_cmd->add_flag("--ground-truth-detector", rp.ground_truth_detector, "use rendered ground truth as detector");
  rp.pick_failure_opt = rp_cmd->add_option("--pick-failure", rp.pick_failure, "probability that a pick slips");
  rp_cmd->add_flag("--no-frames", rp.no_frames, "skip the per-step overlay frames");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "filtered vs. unfiltered grasp statistics over random bag scenes");
  cmp_cmd->add_option("--scenes", cmp.scenes, "number of scenes")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--bags", cmp.bags, "bags per scene")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--top-k", cmp.top_k, "unfiltered ranks inspected per scene")->check(CLI::PositiveNumber);
  cmp.seed.add(cmp_cmd);
  cmp.flags.add(cmp_cmd);
  cmp_cmd->add_option("-o,--out", cmp.out, "directory for compare.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_scene(gen);
    if (*pg_cmd) return cmd_plan_grasp(pg);
    if (*ps_cmd) return cmd_plan_suction(ps);
    if (*det_cmd) return cmd_detect(det);
    if (*rp_cmd) {
      if (rp.in.empty() && rp_bags->count() + rp_env->count() == 0)
        throw UsageError("run-pipeline needs --in or --bags/--envelopes");
      return cmd_run_pipeline(rp);
    }
    if (*cmp_cmd) return cmd_compare(cmp);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
