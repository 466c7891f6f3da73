#pragma once

#include <cstdint>
#include <vector>

#include "parcelpick/pipeline.hpp"

namespace parcelpick {

struct StudyOptions {
  int scenes = 50;
  int bags_per_scene = 1;
  std::uint64_t seed = 0;
  int top_k = 10;
  GraspPlanningConfig grasp;  // use_filter is ignored; both modes are run
  RenderOptions render;
  CameraIntrinsics camera;
};

struct SceneStudy {
  std::uint64_t scene_seed = 0;
  std::size_t candidates = 0;
  std::size_t filtered = 0;
  std::size_t filtered_in_corner = 0;
  std::size_t filtered_on_lump = 0;
  std::size_t raw_top = 0;
  std::size_t raw_top_on_lump = 0;
};

struct FilterComparison {
  std::vector<SceneStudy> scenes;
  std::size_t filtered = 0;
  std::size_t filtered_in_corner = 0;
  std::size_t filtered_on_lump = 0;
  std::size_t raw_top = 0;
  std::size_t raw_top_on_lump = 0;

  double corner_rate() const { return filtered ? double(filtered_in_corner) / double(filtered) : 0.0; }
  double lump_rate() const { return filtered ? double(filtered_on_lump) / double(filtered) : 0.0; }
  double raw_lump_rate() const { return raw_top ? double(raw_top_on_lump) / double(raw_top) : 0.0; }
};

/// Seed of scene `i` in a study or corpus generated from `seed`.
std::uint64_t scene_seed(std::uint64_t seed, int i);

/// Renders `scenes` random bag scenes and measures where filtered grasp
/// centers land, and where the top-k unfiltered ranked centers land, against
/// the renderer's ground truth.
FilterComparison compare_filter(const StudyOptions& opts);

}  // namespace parcelpick
