#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "parcelpick/errors.hpp"
#include "parcelpick/random.hpp"
#include "parcelpick/suction.hpp"

using namespace parcelpick;

namespace {

const CameraIntrinsics kCam;
constexpr double kDeg = std::numbers::pi / 180.0;

// Plane tilted about the camera y axis: z = z0 + tan(angle) * x.
DepthImage tilted_plane(double z0, double angle) {
  DepthImage d(kCam.width, kCam.height);
  const double t = std::tan(angle);
  for (int v = 0; v < d.height(); ++v)
    for (int u = 0; u < d.width(); ++u) d.set(u, v, z0 / (1.0 - t * (u - kCam.cx) / kCam.fx));
  return d;
}

double orthogonal_rms(const std::vector<Point3>& pts, const Eigen::Vector3d& n, const Eigen::Vector3d& c) {
  double sq = 0;
  for (const Point3& p : pts) {
    const double r = (Eigen::Vector3d(p.x, p.y, p.z) - c).dot(n);
    sq += r * r;
  }
  return std::sqrt(sq / static_cast<double>(pts.size()));
}

}  // namespace

TEST_CASE("flat plane gives the optical axis as normal") {
  const DepthImage d(kCam.width, kCam.height, 1.0);
  SuctionConfig cfg;
  cfg.rng_seed = 1;
  const SuctionCandidate s = sample_suction(d, kCam, {{200, 150}, {400, 300}}, cfg);
  CHECK(s.tilt <= 1e-6);
  CHECK(s.planarity_rms < 1e-9);
  CHECK(s.normal.z == doctest::Approx(-1.0));
  CHECK(std::hypot(s.normal.x, s.normal.y, s.normal.z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tilt beyond the limit is rejected") {
  const DepthImage d = tilted_plane(1.0, 10 * kDeg);
  SuctionConfig cfg;
  cfg.max_tilt = 5 * kDeg;
  CHECK_THROWS_AS(sample_suction(d, kCam, {{200, 150}, {400, 300}}, cfg), NoSuctionError);
  cfg.max_tilt = 15 * kDeg;
  const SuctionCandidate s = sample_suction(d, kCam, {{200, 150}, {400, 300}}, cfg);
  CHECK(s.tilt == doctest::Approx(10 * kDeg).epsilon(1e-6));
}

TEST_CASE("a bump at the center is avoided") {
  DepthImage d(kCam.width, kCam.height, 1.0);
  const int cu = 300, cv = 225, radius = 10;
  for (int v = cv - radius; v <= cv + radius; ++v)
    for (int u = cu - radius; u <= cu + radius; ++u) d.set(u, v, 0.99);
  SuctionConfig cfg;
  cfg.rng_seed = 3;
  const SuctionCandidate s = sample_suction(d, kCam, {{200, 150}, {400, 300}}, cfg);
  const int r = cfg.window_px / 2;
  const bool overlaps = std::abs(s.pixel.u - cu) <= radius + r && std::abs(s.pixel.v - cv) <= radius + r;
  CHECK_FALSE(overlaps);
  CHECK(s.planarity_rms < 1e-9);
}

TEST_CASE("plane fit recovers noiseless planes") {
  Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    const double a = uniform(rng, -0.5, 0.5), b = uniform(rng, -0.5, 0.5), c = uniform(rng, 0.5, 2.0);
    std::vector<Point3> pts;
    for (int j = 0; j < 30; ++j) {
      const double x = uniform(rng, -0.2, 0.2), y = uniform(rng, -0.2, 0.2);
      pts.push_back({x, y, a * x + b * y + c});
    }
    const PlaneFit f = fit_plane(pts);
    const Eigen::Vector3d expect = Eigen::Vector3d(a, b, -1).normalized();
    const double angle = std::acos(std::min(1.0, Eigen::Vector3d(f.normal.x, f.normal.y, f.normal.z).dot(expect)));
    CHECK(angle < 1e-6);
    CHECK(f.rms < 1e-9);
  }
}

TEST_CASE("plane fit minimises orthogonal residuals") {
  // Compare with the vertical least-squares plane z = a x + b y + c solved by
  // normal equations; the orthogonal fit can never do worse.
  Rng rng(53);
  for (int i = 0; i < 100; ++i) {
    std::vector<Point3> pts;
    Eigen::MatrixXd A(40, 3);
    Eigen::VectorXd z(40);
    for (int j = 0; j < 40; ++j) {
      const double x = uniform(rng, -0.2, 0.2), y = uniform(rng, -0.2, 0.2);
      const double zz = 0.1 * x - 0.2 * y + 1.0 + 0.005 * standard_normal(rng);
      pts.push_back({x, y, zz});
      A.row(j) << x, y, 1.0;
      z(j) = zz;
    }
    const Eigen::Vector3d sol = (A.transpose() * A).ldlt().solve(A.transpose() * z);
    const Eigen::Vector3d n = Eigen::Vector3d(sol(0), sol(1), -1).normalized();
    const Eigen::Vector3d on_plane(0, 0, sol(2));
    const PlaneFit f = fit_plane(pts);
    CHECK(f.rms <= orthogonal_rms(pts, n, on_plane) + 1e-12);
    const Eigen::Vector3d fn(f.normal.x, f.normal.y, f.normal.z);
    const Eigen::Vector3d fc(f.centroid.x, f.centroid.y, f.centroid.z);
    CHECK(f.rms == doctest::Approx(orthogonal_rms(pts, fn, fc)).epsilon(1e-9));
    CHECK(f.normal.z <= 0);
  }
}

TEST_CASE("plane fit needs three points") {
  const std::vector<Point3> two = {{0, 0, 1}, {1, 0, 1}};
  CHECK_THROWS(fit_plane(two));
}

TEST_CASE("returned pixel lies in the box and in the mask") {
  const DepthImage d = tilted_plane(1.2, 4 * kDeg);
  Mask mask(kCam.width, kCam.height);
  for (int v = 150; v <= 300; ++v)
    for (int u = 300; u <= 400; ++u) mask.set(u, v);
  Rng rng(59);
  for (int i = 0; i < 20; ++i) {
    SuctionConfig cfg;
    cfg.rng_seed = rng();
    const BoundingBox box{{200, 150}, {400, 300}};
    const SuctionCandidate s = sample_suction(d, kCam, box, cfg, &mask);
    CHECK(box.contains(s.pixel));
    CHECK(mask.test(s.pixel.u, s.pixel.v));
    CHECK(std::hypot(s.normal.x, s.normal.y, s.normal.z) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.normal.z < 0);
  }
}

TEST_CASE("suction sampling is deterministic per seed") {
  DepthImage d = tilted_plane(1.0, 3 * kDeg);
  Rng noise(61);
  for (int v = 0; v < d.height(); ++v)
    for (int u = 0; u < d.width(); ++u) d.set(u, v, d.at(u, v) + 0.0005 * standard_normal(noise));
  SuctionConfig cfg;
  cfg.rng_seed = 7;
  const BoundingBox box{{200, 150}, {400, 300}};
  const SuctionCandidate a = sample_suction(d, kCam, box, cfg);
  const SuctionCandidate b = sample_suction(d, kCam, box, cfg);
  CHECK(a.pixel == b.pixel);
  CHECK(a.planarity_rms == b.planarity_rms);
}

TEST_CASE("suction config validation") {
  SuctionConfig cfg;
  cfg.window_px = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.n_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
