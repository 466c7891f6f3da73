#include "parcelpick/json_io.hpp"

#include <fstream>
#include <initializer_list>

#include "parcelpick/errors.hpp"

namespace parcelpick {

namespace {

Json rgb_json(const Rgb& c) { return Json::array({c.r, c.g, c.b}); }
Json rgbf_json(const RgbF& c) { return Json::array({c.r, c.g, c.b}); }
Json vec2_json(const Vec2& v) { return Json::array({v.x, v.y}); }

Rgb rgb_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("color must be [r, g, b]");
  Rgb c;
  const auto channel = [](const Json& x) {
    const int v = x.get<int>();
    if (v < 0 || v > 255) throw ConfigError("color channel out of range");
    return static_cast<std::uint8_t>(v);
  };
  c.r = channel(j[0]);
  c.g = channel(j[1]);
  c.b = channel(j[2]);
  return c;
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_opt(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

Json to_json(const Pixel& p) { return Json::array({p.u, p.v}); }

Json to_json(const BoundingBox& b) { return {{"min", to_json(b.min)}, {"max", to_json(b.max)}}; }

Json to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const Json& j) {
  CameraIntrinsics k;
  try {
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("camera: ") + e.what());
  }
  k.validate();
  return k;
}

Json to_json(const GraspCandidate& g) {
  return {{"center", to_json(g.center)},
          {"axis_angle", g.axis_angle},
          {"jaw1", to_json(g.jaw1)},
          {"jaw2", to_json(g.jaw2)},
          {"d0", g.d0},
          {"jaw_separation_px", g.jaw_separation_px},
          {"jaw_separation_m", g.jaw_separation_m},
          {"jaw1_normal", vec2_json(g.jaw1_normal)},
          {"jaw2_normal", vec2_json(g.jaw2_normal)}};
}

Json to_json(const RegionStats& s) {
  return {{"d0", s.d0},           {"d1", s.d1},       {"d2", s.d2},       {"mu_d", s.mu_d},
          {"sigma_d", s.sigma_d}, {"d_max", s.d_max}, {"d_min", s.d_min}, {"c1", rgbf_json(s.c1)},
          {"c2", rgbf_json(s.c2)}, {"mu_c", rgbf_json(s.mu_c)}, {"sigma_c", s.sigma_c},
          {"region_pixels", s.region_pixels}};
}

Json to_json(const FilterVerdict& v) {
  Json j = Json::object();
  const auto c = v.conditions();
  for (std::size_t i = 0; i < c.size(); ++i) j[kConditionNames[i]] = c[i];
  return j;
}

Json to_json(const GraspScore& s) {
  return {{"candidate", to_json(s.candidate)},
          {"score", s.score},
          {"components",
           {{"antipodality", s.components.antipodality},
            {"elevation", s.components.elevation},
            {"contrast", s.components.contrast}}}};
}

Json to_json(const SuctionCandidate& s) {
  return {{"pixel", to_json(s.pixel)},
          {"point", Json::array({s.point.x, s.point.y, s.point.z})},
          {"normal", Json::array({s.normal.x, s.normal.y, s.normal.z})},
          {"planarity_rms", s.planarity_rms},
          {"tilt", s.tilt},
          {"distance_to_center_px", s.distance_to_center_px}};
}

Json rle_encode(const Mask& m) {
  Json counts = Json::array();
  std::uint8_t current = 0;
  long run = 0;
  for (std::uint8_t x : m.data()) {
    const std::uint8_t bit = x ? 1 : 0;
    if (bit != current) {
      counts.push_back(run);
      current = bit;
      run = 0;
    }
    ++run;
  }
  counts.push_back(run);
  return {{"width", m.width()}, {"height", m.height()}, {"counts", counts}};
}

Mask rle_decode(const Json& j) {
  const int w = j.at("width").get<int>();
  const int h = j.at("height").get<int>();
  if (w < 0 || h < 0) throw ConfigError("rle: negative size");
  Mask m(w, h);
  long pos = 0;
  bool on = false;
  const long total = static_cast<long>(w) * h;
  for (const Json& c : j.at("counts")) {
    const long n = c.get<long>();
    if (n < 0 || pos + n > total) throw ConfigError("rle: counts exceed the mask size");
    for (long i = 0; i < n; ++i, ++pos)
      if (on) m.set(static_cast<int>(pos % w), static_cast<int>(pos / w));
    on = !on;
  }
  if (pos != total) throw ConfigError("rle: counts do not cover the mask");
  return m;
}

Json to_json(const Detection& d) {
  return {{"bbox", to_json(d.bbox)},
          {"class", to_string(d.cls)},
          {"confidence", d.confidence},
          {"area", d.area()},
          {"mask", d.mask ? rle_encode(*d.mask) : Json(nullptr)}};
}

Json detections_to_json(const std::vector<Detection>& dets) {
  Json arr = Json::array();
  for (const Detection& d : dets) arr.push_back(to_json(d));
  return {{"detections", arr}};
}

Json to_json(const SceneObject& o) {
  Json j = {{"id", o.id},
            {"class", to_string(o.cls)},
            {"pose", {{"x", o.pose.x}, {"y", o.pose.y}, {"yaw", o.pose.yaw}}},
            {"half_a", o.half_a},
            {"half_b", o.half_b},
            {"barcode_up", o.barcode_up},
            {"color", rgb_json(o.color)},
            {"label_color", rgb_json(o.label_color)}};
  if (o.cls == PackageClass::Bag) {
    j["lump_height"] = o.lump_height;
    j["flap_band"] = o.flap_band;
    j["corner_lip_height"] = o.corner_lip_height;
  }
  return j;
}

SceneObject scene_object_from_json(const Json& j) {
  check_keys(j,
             {"id", "class", "pose", "half_a", "half_b", "barcode_up", "color", "label_color", "lump_height",
              "flap_band", "corner_lip_height"},
             "object");
  SceneObject o;
  try {
    o.id = j.at("id").get<int>();
    o.cls = parse_package_class(j.at("class").get<std::string>());
    const Json& pose = j.at("pose");
    o.pose = {pose.at("x").get<double>(), pose.at("y").get<double>(), pose.value("yaw", 0.0)};
    read_opt(j, "half_a", o.half_a);
    read_opt(j, "half_b", o.half_b);
    read_opt(j, "barcode_up", o.barcode_up);
    read_opt(j, "lump_height", o.lump_height);
    read_opt(j, "flap_band", o.flap_band);
    read_opt(j, "corner_lip_height", o.corner_lip_height);
    if (j.contains("color")) o.color = rgb_from(j["color"]);
    if (j.contains("label_color")) o.label_color = rgb_from(j["label_color"]);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("object: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("object: ") + e.what());
  }
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("object: ") + e.what());
  }
  return o;
}

Json to_json(const SceneTruth& t) {
  Json objs = Json::array();
  for (std::size_t i = 0; i < t.per_object.size(); ++i) {
    const ObjectTruth& o = t.per_object[i];
    Mask visible(t.width, t.height);
    for (int v = 0; v < t.height; ++v)
      for (int u = 0; u < t.width; ++u)
        if (t.visible_at(u, v) == o.id) visible.set(u, v);
    Json corners = Json::array();
    for (const Polygon& poly : o.corner_regions) {
      Json pts = Json::array();
      for (const PixelCoord& p : poly) pts.push_back(Json::array({p.u, p.v}));
      corners.push_back(pts);
    }
    objs.push_back({{"id", o.id},
                    {"class", to_string(o.cls)},
                    {"barcode_up", o.barcode_up},
                    {"visible_pixels", o.visible_pixels},
                    {"footprint", rle_encode(o.footprint)},
                    {"visible", rle_encode(visible)},
                    {"lump", rle_encode(o.lump)},
                    {"corner_regions", corners},
                    {"label_bbox", o.label_bbox ? to_json(*o.label_bbox) : Json(nullptr)}});
  }
  return {{"width", t.width}, {"height", t.height}, {"table_depth", t.table_depth}, {"objects", objs}};
}

Json to_json(const SceneSpec& s) {
  Json objs = Json::array();
  for (const SceneObject& o : s.objects) objs.push_back(to_json(o));
  return {{"camera", to_json(s.camera)},
          {"render",
           {{"table_depth", s.render.table_depth},
            {"noise_sigma", s.render.noise_sigma},
            {"noise_seed", s.render.noise_seed},
            {"table_color", rgb_json(s.render.table_color)}}},
          {"objects", objs}};
}

SceneSpec scene_spec_from_json(const Json& j) {
  check_keys(j, {"camera", "render", "objects"}, "scene");
  SceneSpec s;
  if (j.contains("camera")) s.camera = intrinsics_from_json(j["camera"]);
  if (j.contains("render")) {
    const Json& r = j["render"];
    check_keys(r, {"table_depth", "noise_sigma", "noise_seed", "table_color"}, "scene.render");
    try {
      read_opt(r, "table_depth", s.render.table_depth);
      read_opt(r, "noise_sigma", s.render.noise_sigma);
      read_opt(r, "noise_seed", s.render.noise_seed);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("scene.render: ") + e.what());
    }
    if (r.contains("table_color")) s.render.table_color = rgb_from(r["table_color"]);
  }
  if (j.contains("objects"))
    for (const Json& o : j["objects"]) s.objects.push_back(scene_object_from_json(o));
  return s;
}

Json grasp_plan_to_json(const GraspPlanResult& r, const GraspPlanningConfig& cfg) {
  Json cands = Json::array();
  Json filtered = Json::array();
  for (const FilterRecord& rec : r.filter.records) {
    Json c = to_json(r.candidates[rec.index]);
    c["index"] = rec.index;
    c["in_bounds"] = !rec.out_of_bounds;
    c["stats"] = rec.stats ? to_json(*rec.stats) : Json(nullptr);
    c["conditions"] = rec.out_of_bounds ? Json(nullptr) : to_json(rec.verdict);
    c["passed"] = !rec.out_of_bounds && rec.verdict.passed();
    if (c["passed"].get<bool>()) filtered.push_back(rec.index);
    cands.push_back(std::move(c));
  }
  Json ranked = Json::array();
  for (const GraspScore& s : r.ranked) ranked.push_back(to_json(s));
  const auto mv = r.filter.most_violated();
  return {{"use_filter", cfg.use_filter},
          {"candidates", cands},
          {"filtered", filtered},
          {"out_of_bounds", r.filter.out_of_bounds},
          {"most_violated", mv ? Json(kConditionNames[*mv]) : Json(nullptr)},
          {"ranked", ranked},
          {"selected", r.ranked.empty() ? Json(nullptr) : ranked.front()}};
}

Json to_json(const PlanRecord& p) {
  return {{"tick", p.tick},
          {"target", p.target},
          {"detected_class", to_string(p.detected_class)},
          {"detection_bbox", to_json(p.detection_bbox)},
          {"candidates", p.candidates},
          {"filtered", p.filtered},
          {"grasp", p.grasp ? to_json(*p.grasp) : Json(nullptr)},
          {"suction", p.suction ? to_json(*p.suction) : Json(nullptr)},
          {"failure", p.failure.empty() ? Json(nullptr) : Json(p.failure)}};
}

Json to_json(const Action& a) {
  return {{"tick", a.tick},
          {"kind", to_string(a.kind)},
          {"target", a.target},
          {"plan", a.plan},
          {"success", a.success}};
}

Json to_json(const PipelineRun& run) {
  Json objs = Json::array();
  for (const ObjectOutcome& o : run.report.objects)
    objs.push_back({{"id", o.id}, {"class", to_string(o.cls)}, {"outcome", o.outcome}, {"reversed", o.reversed}});
  Json actions = Json::array();
  for (const Action& a : run.state.action_log) actions.push_back(to_json(a));
  Json plans = Json::array();
  for (const PlanRecord& p : run.state.plans) plans.push_back(to_json(p));
  return {{"all_placed", run.report.all_placed},
          {"picks_attempted", run.report.picks_attempted},
          {"reversals", run.report.reversals},
          {"final_stage", to_string(run.state.stage)},
          {"objects", objs},
          {"actions", actions},
          {"plans", plans}};
}

Json to_json(const PipelineConfig& c) {
  const auto& g = c.grasp;
  return {
      {"sampler",
       {{"gradient_threshold", g.sampler.gradient_threshold},
        {"friction_coefficient", g.sampler.friction_coefficient},
        {"max_gripper_width", g.sampler.max_gripper_width},
        {"max_candidates", g.sampler.max_candidates}}},
      {"region", {{"rect_height_px", g.region.rect_height_px}, {"jaw_window_px", g.region.jaw_window_px}}},
      {"thresholds",
       {{"eps1", g.thresholds.eps1},
        {"eps2", g.thresholds.eps2},
        {"eps3", g.thresholds.eps3},
        {"eps4", g.thresholds.eps4},
        {"eps5", g.thresholds.eps5},
        {"eps6", g.thresholds.eps6},
        {"signed_color_difference", g.thresholds.signed_color_difference}}},
      {"scorer",
       {{"w_antipodal", g.scorer.w_antipodal},
        {"w_elevation", g.scorer.w_elevation},
        {"w_contrast", g.scorer.w_contrast},
        {"elevation_saturation", g.scorer.elevation_saturation}}},
      {"use_filter", g.use_filter},
      {"suction",
       {{"n_samples", c.suction.n_samples},
        {"sigma_px", c.suction.sigma_px},
        {"window_px", c.suction.window_px},
        {"max_rms", c.suction.max_rms},
        {"max_tilt", c.suction.max_tilt}}},
      {"detector",
       {{"foreground_margin", c.detector.foreground_margin},
        {"smoothing_px", c.detector.smoothing_px},
        {"min_area", c.detector.min_area},
        {"envelope_max_elevation", c.detector.envelope_max_elevation},
        {"elevation_percentile", c.detector.elevation_percentile}}},
      {"render", {{"table_depth", c.render.table_depth}, {"noise_sigma", c.render.noise_sigma}}},
      {"ground_truth_detector", c.ground_truth_detector},
      {"pick_failure_probability", c.pick_failure_probability},
      {"seed", c.seed},
      {"max_steps", c.max_steps},
      {"roi_margin_px", c.roi_margin_px}};
}

void apply_config(const Json& j, PipelineConfig& c) {
  check_keys(j,
             {"sampler", "region", "thresholds", "scorer", "use_filter", "suction", "detector", "render",
              "ground_truth_detector", "pick_failure_probability", "seed", "max_steps", "roi_margin_px"},
             "config");
  auto& g = c.grasp;
  try {
    if (j.contains("sampler")) {
      const Json& s = j["sampler"];
      check_keys(s, {"gradient_threshold", "friction_coefficient", "max_gripper_width", "max_candidates"},
                 "config.sampler");
      read_opt(s, "gradient_threshold", g.sampler.gradient_threshold);
      read_opt(s, "friction_coefficient", g.sampler.friction_coefficient);
      read_opt(s, "max_gripper_width", g.sampler.max_gripper_width);
      read_opt(s, "max_candidates", g.sampler.max_candidates);
    }
    if (j.contains("region")) {
      const Json& s = j["region"];
      check_keys(s, {"rect_height_px", "jaw_window_px"}, "config.region");
      read_opt(s, "rect_height_px", g.region.rect_height_px);
      read_opt(s, "jaw_window_px", g.region.jaw_window_px);
    }
    if (j.contains("thresholds")) {
      const Json& s = j["thresholds"];
      check_keys(s, {"eps1", "eps2", "eps3", "eps4", "eps5", "eps6", "signed_color_difference"},
                 "config.thresholds");
      read_opt(s, "eps1", g.thresholds.eps1);
      read_opt(s, "eps2", g.thresholds.eps2);
      read_opt(s, "eps3", g.thresholds.eps3);
      read_opt(s, "eps4", g.thresholds.eps4);
      read_opt(s, "eps5", g.thresholds.eps5);
      read_opt(s, "eps6", g.thresholds.eps6);
      read_opt(s, "signed_color_difference", g.thresholds.signed_color_difference);
    }
    if (j.contains("scorer")) {
      const Json& s = j["scorer"];
      check_keys(s, {"w_antipodal", "w_elevation", "w_contrast", "elevation_saturation"}, "config.scorer");
      read_opt(s, "w_antipodal", g.scorer.w_antipodal);
      read_opt(s, "w_elevation", g.scorer.w_elevation);
      read_opt(s, "w_contrast", g.scorer.w_contrast);
      read_opt(s, "elevation_saturation", g.scorer.elevation_saturation);
    }
    read_opt(j, "use_filter", g.use_filter);
    if (j.contains("suction")) {
      const Json& s = j["suction"];
      check_keys(s, {"n_samples", "sigma_px", "window_px", "max_rms", "max_tilt"}, "config.suction");
      read_opt(s, "n_samples", c.suction.n_samples);
      read_opt(s, "sigma_px", c.suction.sigma_px);
      read_opt(s, "window_px", c.suction.window_px);
      read_opt(s, "max_rms", c.suction.max_rms);
      read_opt(s, "max_tilt", c.suction.max_tilt);
    }
    if (j.contains("detector")) {
      const Json& s = j["detector"];
      check_keys(s,
                 {"foreground_margin", "smoothing_px", "min_area", "envelope_max_elevation", "elevation_percentile"},
                 "config.detector");
      read_opt(s, "foreground_margin", c.detector.foreground_margin);
      read_opt(s, "smoothing_px", c.detector.smoothing_px);
      read_opt(s, "min_area", c.detector.min_area);
      read_opt(s, "envelope_max_elevation", c.detector.envelope_max_elevation);
      read_opt(s, "elevation_percentile", c.detector.elevation_percentile);
    }
    if (j.contains("render")) {
      const Json& s = j["render"];
      check_keys(s, {"table_depth", "noise_sigma"}, "config.render");
      read_opt(s, "table_depth", c.render.table_depth);
      read_opt(s, "noise_sigma", c.render.noise_sigma);
    }
    read_opt(j, "ground_truth_detector", c.ground_truth_detector);
    read_opt(j, "pick_failure_probability", c.pick_failure_probability);
    read_opt(j, "seed", c.seed);
    read_opt(j, "max_steps", c.max_steps);
    read_opt(j, "roi_margin_px", c.roi_margin_px);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  g.sampler.validate();
  g.region.validate();
  g.thresholds.validate();
  g.scorer.validate();
  c.suction.validate();
  c.detector.validate();
  if (!(c.pick_failure_probability >= 0 && c.pick_failure_probability <= 1))
    throw ConfigError("config: pick_failure_probability must be in [0, 1]");
  if (c.max_steps < 1) throw ConfigError("config: max_steps must be >= 1");
  if (c.roi_margin_px < 0) throw ConfigError("config: roi_margin_px must be >= 0");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace parcelpick
