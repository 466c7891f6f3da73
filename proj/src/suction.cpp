#include "parcelpick/suction.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "parcelpick/errors.hpp"
#include "parcelpick/random.hpp"

namespace parcelpick {

void SuctionConfig::validate() const {
  if (n_samples < 1) throw ConfigError("suction: n_samples must be >= 1");
  if (window_px < 3 || window_px % 2 == 0) throw ConfigError("suction: window_px must be odd and >= 3");
  if (!(max_rms >= 0)) throw ConfigError("suction: max_rms must be >= 0");
  if (!(max_tilt >= 0)) throw ConfigError("suction: max_tilt must be >= 0");
}

PlaneFit fit_plane(std::span<const Point3> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_plane: need at least three points");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const Point3& p : points) centroid += Eigen::Vector3d(p.x, p.y, p.z);
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const Point3& p : points) {
    const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - centroid;
    scatter += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scatter);
  Eigen::Vector3d n = eig.eigenvectors().col(0).normalized();
  if (n.z() > 0) n = -n;
  double sq = 0;
  for (const Point3& p : points) {
    const double r = (Eigen::Vector3d(p.x, p.y, p.z) - centroid).dot(n);
    sq += r * r;
  }
  return {{centroid.x(), centroid.y(), centroid.z()},
          {n.x(), n.y(), n.z()},
          std::sqrt(sq / static_cast<double>(points.size()))};
}

double tilt_from_optical_axis(const Vec3& normal) {
  return std::acos(std::clamp(-normal.z, -1.0, 1.0));
}

SuctionCandidate sample_suction(const DepthImage& depth, const CameraIntrinsics& k, const BoundingBox& bbox,
                                const SuctionConfig& cfg, const Mask* mask) {
  cfg.validate();
  if (!bbox.valid() || !depth.contains(bbox.min.u, bbox.min.v) || !depth.contains(bbox.max.u, bbox.max.v))
    throw std::invalid_argument("sample_suction: bbox outside the image");

  const double cu = 0.5 * (bbox.min.u + bbox.max.u);
  const double cv = 0.5 * (bbox.min.v + bbox.max.v);
  const double sigma = cfg.sigma_px > 0 ? cfg.sigma_px : std::min(bbox.width(), bbox.height()) / 6.0;
  const int r = cfg.window_px / 2;

  Rng rng(cfg.rng_seed);
  std::vector<Pixel> samples;
  const long max_draws = 1000L * cfg.n_samples;
  for (long t = 0; t < max_draws && static_cast<int>(samples.size()) < cfg.n_samples; ++t) {
    const double du = sigma * standard_normal(rng);
    const double dv = sigma * standard_normal(rng);
    const Pixel p{static_cast<int>(std::floor(cu + du + 0.5)), static_cast<int>(std::floor(cv + dv + 0.5))};
    if (!bbox.contains(p)) continue;
    if (mask && !mask->test(p.u, p.v)) continue;
    samples.push_back(p);
  }

  std::optional<SuctionCandidate> best;
  std::vector<Point3> pts;
  for (const Pixel& p : samples) {
    if (!depth.contains(p.u - r, p.v - r) || !depth.contains(p.u + r, p.v + r)) continue;
    if (!depth.valid(p.u, p.v)) continue;
    pts.clear();
    for (int v = p.v - r; v <= p.v + r; ++v)
      for (int u = p.u - r; u <= p.u + r; ++u)
        if (depth.valid(u, v)) pts.push_back(deproject(u, v, depth.at(u, v), k));
    if (pts.size() < 3) continue;
    const PlaneFit fit = fit_plane(pts);
    const double tilt = tilt_from_optical_axis(fit.normal);
    if (fit.rms > cfg.max_rms || tilt > cfg.max_tilt) continue;
    SuctionCandidate c{p, deproject(p.u, p.v, depth.at(p), k), fit.normal, fit.rms, tilt,
                       std::hypot(p.u - cu, p.v - cv)};
    auto key = [](const SuctionCandidate& s) {
      return std::tie(s.planarity_rms, s.distance_to_center_px, s.pixel);
    };
    if (!best || key(c) < key(*best)) best = c;
  }
  if (!best) throw NoSuctionError("no suction sample passed the planarity and tilt checks");
  return *best;
}

}  // namespace parcelpick
