#include <doctest.h>

#include <algorithm>

#include "parcelpick/detection.hpp"
#include "parcelpick/errors.hpp"
#include "parcelpick/random.hpp"

using namespace parcelpick;

namespace {

const CameraIntrinsics kCam;

SceneObject envelope(int id, double x, double y, double yaw = 0) {
  SceneObject o;
  o.id = id;
  o.cls = PackageClass::Envelope;
  o.pose = {x, y, yaw};
  o.half_a = 0.11;
  o.half_b = 0.075;
  return o;
}

SceneObject bag(int id, double x, double y, double yaw = 0) {
  SceneObject o;
  o.id = id;
  o.pose = {x, y, yaw};
  o.half_a = 0.12;
  o.half_b = 0.08;
  return o;
}

BoundingBox truth_bbox(const SceneTruth& t, int id) {
  BoundingBox b{{t.width, t.height}, {-1, -1}};
  for (int v = 0; v < t.height; ++v)
    for (int u = 0; u < t.width; ++u)
      if (t.visible_at(u, v) == id) {
        b.min = {std::min(b.min.u, u), std::min(b.min.v, v)};
        b.max = {std::max(b.max.u, u), std::max(b.max.v, v)};
      }
  return b;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const int iu = std::min(a.max.u, b.max.u) - std::max(a.min.u, b.min.u) + 1;
  const int iv = std::min(a.max.v, b.max.v) - std::max(a.min.v, b.min.v) + 1;
  if (iu <= 0 || iv <= 0) return 0.0;
  const double inter = static_cast<double>(iu) * iv;
  const double area_a = static_cast<double>(a.max.u - a.min.u + 1) * (a.max.v - a.min.v + 1);
  const double area_b = static_cast<double>(b.max.u - b.min.u + 1) * (b.max.v - b.min.v + 1);
  return inter / (area_a + area_b - inter);
}

double table_fraction(const Detection& d, const SceneTruth& t) {
  std::size_t on_table = 0, total = 0;
  for (int v = 0; v < t.height; ++v)
    for (int u = 0; u < t.width; ++u)
      if (d.mask->test(u, v)) {
        ++total;
        on_table += t.visible_at(u, v) < 0;
      }
  return static_cast<double>(on_table) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("empty table has no detections") {
  const RenderedScene s = render_scene({}, kCam, {.noise_seed = 1});
  CHECK(detect_packages(s.color, s.depth, {}).empty());
}

TEST_CASE("envelope and bag are found and classified") {
  SceneObject b = bag(1, 0.14, 0.0, 0.2);
  b.lump_height = 0.06;
  const RenderedScene s = render_scene({envelope(0, -0.17, 0.02, -0.3), b}, kCam, {.noise_seed = 2});
  const auto dets = detect_packages(s.color, s.depth, {});
  REQUIRE(dets.size() == 2);
  for (const Detection& d : dets) {
    const int id = d.cls == PackageClass::Envelope ? 0 : 1;
    CHECK(iou(d.bbox, truth_bbox(s.truth, id)) >= 0.5);
    CHECK(table_fraction(d, s.truth) <= 0.05);
    CHECK(d.area() == static_cast<long>(d.mask->count()));
  }
  CHECK(dets[0].cls != dets[1].cls);
  CHECK(dets[0].area() >= dets[1].area());
}

TEST_CASE("overlapping bags merge into one bag detection") {
  const RenderedScene s = render_scene({bag(0, -0.05, 0.0), bag(1, 0.06, 0.02, 0.4)}, kCam, {.noise_seed = 3});
  const auto dets = detect_packages(s.color, s.depth, {});
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].cls == PackageClass::Bag);
}

TEST_CASE("a uniform 2.5 cm rise turns an envelope into a bag") {
  RenderedScene s = render_scene({envelope(0, 0.0, 0.0)}, kCam, {.noise_seed = 4});
  REQUIRE(detect_packages(s.color, s.depth, {}).at(0).cls == PackageClass::Envelope);
  for (int v = 0; v < kCam.height; ++v)
    for (int u = 0; u < kCam.width; ++u)
      if (s.truth.visible_at(u, v) == 0) s.depth.set(u, v, s.depth.at(u, v) - 0.025);
  const auto dets = detect_packages(s.color, s.depth, {});
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].cls == PackageClass::Bag);
}

TEST_CASE("random mixed scenes keep masks on the packages") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const RenderedScene s = render_scene(random_scene(2, 2, seed, kCam), kCam, {.noise_seed = seed});
    for (const Detection& d : detect_packages(s.color, s.depth, {})) CHECK(table_fraction(d, s.truth) <= 0.05);
  }
}

TEST_CASE("median filter and percentile helpers") {
  DepthImage d(5, 5, 1.0);
  d.set(2, 2, 0.5);
  d.set(0, 0, 0.0);
  const DepthImage m = median_filter(d, 3);
  CHECK(m.at(2, 2) == 1.0);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(median_filter(d, 1) == d);
  CHECK(percentile({3, 1, 2, 4}, 0.5) == 2);
  CHECK(percentile({3, 1, 2, 4}, 1.0) == 4);
  CHECK(percentile({3, 1, 2, 4}, 0.0) == 1);
  CHECK(estimate_table_depth(d) == 1.0);
}

TEST_CASE("ground-truth detector is interchangeable with the baseline") {
  const RenderedScene s = render_scene({envelope(0, -0.15, 0.02), bag(1, 0.14, 0.0)}, kCam, {.noise_seed = 5});
  const DepthBlobDetector baseline;
  const GroundTruthDetector truth(&s.truth);
  const std::vector<const Detector*> detectors = {&baseline, &truth};
  for (const Detector* det : detectors) {
    const auto dets = det->detect(s.color, s.depth);
    REQUIRE(dets.size() == 2);
    CHECK(dets[0].area() >= dets[1].area());
    CHECK(dets[0].mask.has_value());
  }
  const auto gt = truth.detect(s.color, s.depth);
  for (const Detection& d : gt) {
    const int id = d.cls == PackageClass::Envelope ? 0 : 1;
    CHECK(d.bbox == truth_bbox(s.truth, id));
    CHECK(table_fraction(d, s.truth) == 0.0);
  }
}

TEST_CASE("barcode observation follows the held object") {
  const RenderedScene s = render_scene({envelope(0, -0.12, 0.0), bag(1, 0.1, 0.0)}, kCam, {.noise_sigma = 0});
  ObjectTruth up = s.truth.per_object[0];
  ObjectTruth down = s.truth.per_object[1];
  up.barcode_up = true;
  down.barcode_up = false;
  const OracleBarcodeObserver obs;
  CHECK(obs.observe(&up).present);
  CHECK_FALSE(obs.observe(&down).present);
  CHECK_THROWS_AS(obs.observe(nullptr), ProtocolError);
}

TEST_CASE("mismatched frames and bad config are rejected") {
  CHECK_THROWS_AS(detect_packages(ColorImage(10, 10), DepthImage(12, 10, 1.0), {}), RegistrationError);
  DetectorConfig cfg;
  cfg.smoothing_px = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("blob masks equal thresholding the median-filtered depth") {
  const RenderedScene s = render_scene(random_scene(1, 2, 12, kCam), kCam, {.noise_seed = 12});
  DetectorConfig cfg;
  cfg.min_area = 1;
  const double threshold = estimate_table_depth(s.depth) - cfg.foreground_margin;
  const DepthImage smooth = median_filter(s.depth, cfg.smoothing_px);
  Mask fg(kCam.width, kCam.height);
  for (const Detection& d : detect_packages(s.color, s.depth, cfg))
    for (int v = 0; v < kCam.height; ++v)
      for (int u = 0; u < kCam.width; ++u)
        if (d.mask->test(u, v)) fg.set(u, v);
  for (int v = 0; v < kCam.height; ++v)
    for (int u = 0; u < kCam.width; ++u)
      REQUIRE(fg.test(u, v) == (smooth.valid(u, v) && smooth.at(u, v) < threshold));
}
