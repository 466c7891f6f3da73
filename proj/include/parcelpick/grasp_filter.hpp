#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "parcelpick/imaging.hpp"
#include "parcelpick/sampling.hpp"

namespace parcelpick {

/// Depth and color statistics over the area a grasp covers.
struct RegionStats {
  double d0 = 0;      // depth at the grasp center
  double d1 = 0;      // mean depth in the jaw1 window
  double d2 = 0;      // mean depth in the jaw2 window
  double mu_d = 0;
  double sigma_d = 0;
  double d_max = 0;
  double d_min = 0;
  RgbF c1;            // mean color in the jaw1 window
  RgbF c2;
  RgbF mu_c;          // per-channel mean color over the region (reported only)
  double sigma_c = 0; // std-dev of luma over the region
  std::size_t region_pixels = 0;
};

/// Thresholds of the six-test filter. Depth thresholds are meters, color
/// thresholds are 8-bit intensity units.
struct FilterThresholds {
  double eps1 = 0.01;
  double eps2 = 0.01;
  double eps3 = 0.01;
  double eps4 = 0.01;
  double eps5 = 30.0;
  double eps6 = 50.0;
  /// Use the signed jaw color difference instead of its magnitude. The
  /// verdict then depends on which jaw is labelled jaw1.
  bool signed_color_difference = false;

  void validate() const;
};

struct RegionGeometry {
  int rect_height_px = 15;  // finger thickness across the grasp axis
  int jaw_window_px = 5;    // odd side of the square window at each jaw

  void validate() const;
};

/// Outcome of the filter for one candidate, one flag per test.
struct FilterVerdict {
  bool jaws_below_center = false;  // C1: d1, d2 > d0 + eps1
  bool depth_range = false;        // C2: d_max - d_min > eps2
  bool depth_spread = false;       // C3: mu_d > d0 + eps3 and sigma_d > eps4
  bool color_spread = false;       // C4: sigma_c > eps5
  bool jaw_color_contrast = false; // C5: |mean(c1 - c2)| > eps6

  bool passed() const {
    return jaws_below_center && depth_range && depth_spread && color_spread && jaw_color_contrast;
  }
  std::array<bool, 5> conditions() const {
    return {jaws_below_center, depth_range, depth_spread, color_spread, jaw_color_contrast};
  }
};

inline constexpr std::array<const char*, 5> kConditionNames = {"C1_jaws_below_center", "C2_depth_range",
                                                               "C3_depth_spread", "C4_color_spread",
                                                               "C5_jaw_color_contrast"};

/// Pixels covered by the grasp. With s and q the offsets of a pixel center
/// from the jaw midpoint along and across the axis, a pixel belongs when
/// -L/2 - 1/2 <= s < L/2 + 1/2 (L = jaw_separation_px, so both jaws are
/// included) and -H/2 <= q < H/2 (H = rect_height_px). Row-major order; may
/// include pixels outside the image.
std::vector<Pixel> grasp_region(const GraspCandidate& g, const RegionGeometry& geom);

/// Throws OutOfBoundsError when the region or a jaw window leaves the image.
RegionStats region_stats(const DepthImage& depth, const ColorImage& color, const GraspCandidate& g,
                         const RegionGeometry& geom);

/// Mean over channels of (c1 - c2).
double jaw_color_difference(const RegionStats& s);

/// Evaluates the five tests against `s` (d0 is taken from the stats).
FilterVerdict passes_filter(const RegionStats& s, const FilterThresholds& t);

struct FilterRecord {
  std::size_t index = 0;             // position in the input list
  std::optional<RegionStats> stats;  // empty when the region left the image
  FilterVerdict verdict;
  bool out_of_bounds = false;
};

struct FilterResult {
  std::vector<GraspCandidate> kept;  // input order preserved
  std::vector<FilterRecord> records; // one per input candidate
  std::size_t out_of_bounds = 0;

  /// Index into kConditionNames of the condition that failed most often
  /// among in-bounds candidates; empty if nothing was evaluated.
  std::optional<std::size_t> most_violated() const;
};

FilterResult filter_grasps(const std::vector<GraspCandidate>& candidates, const DepthImage& depth,
                           const ColorImage& color, const RegionGeometry& geom, const FilterThresholds& t);

}  // namespace parcelpick
