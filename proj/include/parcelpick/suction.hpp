#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "parcelpick/imaging.hpp"
#include "parcelpick/sampling.hpp"

namespace parcelpick {

struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;
};

struct SuctionCandidate {
  Pixel pixel;
  Point3 point;
  Vec3 normal;              // unit, points toward the camera (z < 0)
  double planarity_rms = 0; // m
  double tilt = 0;          // rad from the optical axis
  double distance_to_center_px = 0;
};

struct SuctionConfig {
  int n_samples = 32;
  double sigma_px = 0;  // <= 0 means min(bbox width, height) / 6
  int window_px = 15;
  double max_rms = 0.002;
  double max_tilt = 0.2617993877991494;  // 15 degrees
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct PlaneFit {
  Point3 centroid;
  Vec3 normal;  // unit, z <= 0
  double rms = 0;
};

/// Least-squares plane through `points` (smallest-variance direction of the
/// centered scatter). Needs at least three points.
PlaneFit fit_plane(std::span<const Point3> points);

/// Angle between a camera-facing normal and the optical axis.
double tilt_from_optical_axis(const Vec3& normal);

/// Samples pixels around the box center, fits a plane in each window and
/// returns the flattest acceptable one (ties by distance to the center).
/// Samples outside `mask` are rejected when a mask is given. Throws
/// NoSuctionError when nothing survives.
SuctionCandidate sample_suction(const DepthImage& depth, const CameraIntrinsics& k, const BoundingBox& bbox,
                                const SuctionConfig& cfg, const Mask* mask = nullptr);

}  // namespace parcelpick
