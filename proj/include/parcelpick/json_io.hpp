#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "parcelpick/detection.hpp"
#include "parcelpick/pipeline.hpp"

namespace parcelpick {

using Json = nlohmann::json;

Json to_json(const Pixel& p);
Json to_json(const BoundingBox& b);
Json to_json(const CameraIntrinsics& k);
Json to_json(const GraspCandidate& g);
Json to_json(const RegionStats& s);
Json to_json(const FilterVerdict& v);
Json to_json(const GraspScore& s);
Json to_json(const SuctionCandidate& s);
Json to_json(const Detection& d);
Json to_json(const SceneObject& o);
Json to_json(const SceneTruth& t);
Json to_json(const PlanRecord& p);
Json to_json(const Action& a);
Json to_json(const PipelineRun& run);

CameraIntrinsics intrinsics_from_json(const Json& j);
SceneObject scene_object_from_json(const Json& j);

/// Run-length encoding of a mask in row-major order. Counts alternate
/// between runs of 0 and 1 and always start with a (possibly empty) 0-run.
Json rle_encode(const Mask& m);
Mask rle_decode(const Json& j);

Json detections_to_json(const std::vector<Detection>& dets);

/// A scene bundle's scene.json: camera, render options and objects.
struct SceneSpec {
  CameraIntrinsics camera;
  RenderOptions render;
  std::vector<SceneObject> objects;
};

Json to_json(const SceneSpec& s);
SceneSpec scene_spec_from_json(const Json& j);

/// Full candidate breakdown as written by plan-grasp.
Json grasp_plan_to_json(const GraspPlanResult& r, const GraspPlanningConfig& cfg);

Json to_json(const PipelineConfig& cfg);
/// Overwrites the fields present in `j`; unknown keys raise ConfigError.
void apply_config(const Json& j, PipelineConfig& cfg);

Json read_json_file(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const Json& j, const std::filesystem::path& path);

}  // namespace parcelpick
