#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parcelpick/imaging.hpp"
#include "parcelpick/sampling.hpp"

namespace parcelpick {

enum class PackageClass { Envelope, Bag };

std::string to_string(PackageClass c);
/// Accepts "envelope" or "bag"; throws std::invalid_argument otherwise.
PackageClass parse_package_class(const std::string& s);

/// Planar pose on the table. x, y are meters in the camera X/Y axes at the
/// table depth; yaw rotates the object's long axis away from +X.
struct Pose2 {
  double x = 0;
  double y = 0;
  double yaw = 0;
};

// Fixed geometry of the synthetic packages, meters.
inline constexpr double kSheetThickness = 0.003;
inline constexpr double kLipOffset = 0.012;     // L1 distance from the corner tip to the lip crest
inline constexpr double kLipHalfWidth = 0.012;  // crest-to-base distance of the lip profile

struct SceneObject {
  int id = 0;
  PackageClass cls = PackageClass::Bag;
  Pose2 pose;
  double half_a = 0.14;  // half extent along the local x axis
  double half_b = 0.09;
  double lump_height = 0.04;        // bags only: contents bulge
  double flap_band = 0.02;          // bags only: sealed margin width
  double corner_lip_height = 0.04;  // bags only: curl of each corner
  bool barcode_up = true;
  Rgb color{200, 120, 60};
  Rgb label_color{235, 235, 225};

  void validate() const;
};

struct RenderOptions {
  double table_depth = 1.0;
  double noise_sigma = 0.0015;  // m; 0 renders noiseless
  std::uint64_t noise_seed = 0;
  Rgb table_color{70, 70, 75};
};

using Polygon = std::vector<PixelCoord>;

bool polygon_contains(const Polygon& poly, double u, double v);

struct ObjectTruth {
  int id = 0;
  PackageClass cls = PackageClass::Bag;
  bool barcode_up = true;
  Mask footprint;                     // whole object, ignoring occlusion
  Mask lump;                          // bags: pixels over the contents bulge
  std::vector<Polygon> corner_regions;  // bags: four corner-flap triangles
  std::optional<BoundingBox> label_bbox;
  std::size_t visible_pixels = 0;
};

struct SceneTruth {
  std::vector<SceneObject> objects;
  std::vector<ObjectTruth> per_object;  // same order as `objects`
  std::vector<int> visible_id;          // per pixel, object id on top or -1
  int width = 0;
  int height = 0;
  double table_depth = 1.0;

  int visible_at(int u, int v) const { return visible_id[static_cast<std::size_t>(v) * width + u]; }
  const ObjectTruth* find(int id) const;
  const SceneObject* find_object(int id) const;
  /// True when the pixel lies in any bag's corner-flap triangle.
  bool in_corner_region(double u, double v) const;
  /// True when the pixel lies over any bag's contents bulge.
  bool in_lump(int u, int v) const;
};

struct RenderedScene {
  ColorImage color;
  DepthImage depth;
  SceneTruth truth;
};

/// Elevation above the table of one object at a table-plane point, or empty
/// when the point is off the object.
std::optional<double> object_elevation(const SceneObject& obj, double x, double y);

/// Height of the contents bulge only (0 outside it).
double lump_elevation(const SceneObject& obj, double x, double y);

/// Pixel footprint of an object (pixel centers inside its rectangle).
Mask footprint_mask(const SceneObject& obj, const CameraIntrinsics& k, double table_depth);

/// Renders a registered RGB-D pair of the objects lying on a table. Where
/// objects overlap the higher surface wins; equal heights go to the later
/// object. Throws FrustumError if an object's footprint leaves the image.
RenderedScene render_scene(const std::vector<SceneObject>& objects, const CameraIntrinsics& k,
                           const RenderOptions& opts = {});

struct RandomSceneOptions {
  double max_overlap = 0.6;  // |A and B| / min(|A|, |B|)
  int max_rejections = 10000;
  int margin_px = 25;
  double table_depth = 1.0;
};

/// Random bags and envelopes with pairwise overlap bounded; deterministic per
/// seed. Throws PlacementError after too many rejected placements.
std::vector<SceneObject> random_scene(int n_bags, int n_envelopes, std::uint64_t seed,
                                      const CameraIntrinsics& k = {}, const RandomSceneOptions& opts = {});

/// Overlap fraction |A and B| / min(|A|, |B|) of two masks.
double overlap_fraction(const Mask& a, const Mask& b);

}  // namespace parcelpick
