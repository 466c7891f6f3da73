#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "parcelpick/imaging.hpp"

namespace parcelpick {

/// Axis-aligned pixel box, both corners inclusive.
struct BoundingBox {
  Pixel min;
  Pixel max;

  int width() const { return max.u - min.u + 1; }
  int height() const { return max.v - min.v + 1; }
  long area() const { return static_cast<long>(width()) * height(); }
  bool contains(Pixel p) const { return p.u >= min.u && p.u <= max.u && p.v >= min.v && p.v <= max.v; }
  bool valid() const { return max.u >= min.u && max.v >= min.v; }
  /// Grows the box by `margin` pixels on every side, clamped to the image.
  BoundingBox dilated(int margin, int image_width, int image_height) const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct EdgePixel {
  Pixel pixel;
  Vec2 direction;  // unit depth-gradient direction (points toward larger depth)
  double magnitude = 0.0;  // meters per pixel
};

struct SamplerConfig {
  double gradient_threshold = 0.0025;  // m/px
  double friction_coefficient = 0.5;
  double max_gripper_width = 0.12;     // m
  int max_candidates = 500;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// A two-jaw grasp in image space.
struct GraspCandidate {
  Pixel center;           // rounded midpoint of the jaws
  double axis_angle = 0;  // radians in [0, pi)
  Pixel jaw1;             // lexicographically smaller (row, column) jaw
  Pixel jaw2;
  double d0 = 0;          // depth at `center`, meters
  double jaw_separation_px = 0;
  double jaw_separation_m = 0;
  Vec2 jaw1_normal;       // unit depth gradient at jaw1
  Vec2 jaw2_normal;

  /// Unit vector from jaw1 to jaw2.
  Vec2 axis() const;
  /// Exact (sub-pixel) midpoint of the jaws.
  PixelCoord midpoint() const;

  friend bool operator==(const GraspCandidate&, const GraspCandidate&) = default;
};

/// Sobel depth gradient, divided by 8 so a unit ramp reads as 1 m/px.
/// Border pixels replicate their neighbours.
struct DepthGradient {
  int width = 0;
  int height = 0;
  std::vector<double> gx;
  std::vector<double> gy;
};
DepthGradient depth_gradient(const DepthImage& depth);

/// Pixels whose gradient magnitude exceeds `cfg.gradient_threshold`, in
/// row-major order.
std::vector<EdgePixel> depth_edges(const DepthImage& depth, const SamplerConfig& cfg);

/// True when both normals lie within the friction cone around the jaw1-jaw2
/// line and point into opposite half-spaces along it.
bool is_antipodal(Pixel p1, Vec2 n1, Pixel p2, Vec2 n2, double friction_coefficient);

/// Rejection-samples antipodal pairs from the depth edges. Deterministic for
/// a given `cfg.rng_seed`. When `roi` is given only edge pixels inside it
/// are considered.
std::vector<GraspCandidate> sample_antipodal(const DepthImage& depth, const CameraIntrinsics& k,
                                             const SamplerConfig& cfg,
                                             const std::optional<BoundingBox>& roi = std::nullopt);

/// Builds a candidate from two jaw pixels and their normals, canonicalising
/// jaw order and axis angle.
GraspCandidate make_candidate(const DepthImage& depth, const CameraIntrinsics& k, Pixel a, Vec2 na, Pixel b,
                              Vec2 nb);

}  // namespace parcelpick
