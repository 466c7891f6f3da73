#pragma once

#include <optional>
#include <vector>

#include "parcelpick/imaging.hpp"
#include "parcelpick/sampling.hpp"
#include "parcelpick/synth.hpp"

namespace parcelpick {

struct Detection {
  BoundingBox bbox;
  PackageClass cls = PackageClass::Bag;
  double confidence = 1.0;
  std::optional<Mask> mask;

  long area() const { return mask ? static_cast<long>(mask->count()) : bbox.area(); }
};

struct DetectorConfig {
  double foreground_margin = 0.0015;      // m above the table
  int smoothing_px = 5;                   // median window applied before thresholding; 1 disables
  int min_area = 200;                     // px
  double envelope_max_elevation = 0.02;   // m, at the elevation percentile
  double elevation_percentile = 0.95;

  void validate() const;
};

/// Median of the valid depths (the upper median for even counts).
double estimate_table_depth(const DepthImage& depth);

/// Nearest-rank percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

/// Median over the valid pixels of a size x size window (clipped at the
/// border); pixels with no valid neighbour stay invalid.
DepthImage median_filter(const DepthImage& depth, int size);

/// Connected foreground blobs above the table, classified by how far they
/// rise above it, largest first.
std::vector<Detection> detect_packages(const ColorImage& color, const DepthImage& depth, const DetectorConfig& cfg);

/// Common interface for anything that turns an RGB-D frame into detections.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const ColorImage& color, const DepthImage& depth) const = 0;
};

class DepthBlobDetector final : public Detector {
 public:
  explicit DepthBlobDetector(DetectorConfig cfg = {}) : cfg_(cfg) {}
  std::vector<Detection> detect(const ColorImage& color, const DepthImage& depth) const override {
    return detect_packages(color, depth, cfg_);
  }

 private:
  DetectorConfig cfg_;
};

/// Emits one detection per object from the renderer's ground truth (visible
/// pixels only), in the same schema and order convention as the baseline.
class GroundTruthDetector final : public Detector {
 public:
  explicit GroundTruthDetector(const SceneTruth* truth, int min_area = 200) : truth_(truth), min_area_(min_area) {}
  std::vector<Detection> detect(const ColorImage& color, const DepthImage& depth) const override;

 private:
  const SceneTruth* truth_;
  int min_area_;
};

struct BarcodeObservation {
  bool present = false;
  std::optional<BoundingBox> bbox;
};

/// Side-camera check of the held object.
class BarcodeObserver {
 public:
  virtual ~BarcodeObserver() = default;
  /// Throws ProtocolError when nothing is held.
  virtual BarcodeObservation observe(const ObjectTruth* held) const = 0;
};

/// Reads the barcode flag straight from the ground truth.
class OracleBarcodeObserver final : public BarcodeObserver {
 public:
  BarcodeObservation observe(const ObjectTruth* held) const override;
};

BarcodeObservation observe_barcode(const ObjectTruth* held);

}  // namespace parcelpick
