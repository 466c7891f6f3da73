#include "parcelpick/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "parcelpick/errors.hpp"
#include "parcelpick/random.hpp"

namespace parcelpick {

BoundingBox BoundingBox::dilated(int margin, int image_width, int image_height) const {
  return {{std::max(0, min.u - margin), std::max(0, min.v - margin)},
          {std::min(image_width - 1, max.u + margin), std::min(image_height - 1, max.v + margin)}};
}

void SamplerConfig::validate() const {
  if (!(friction_coefficient > 0.0)) throw ConfigError("sampler: friction_coefficient must be > 0");
  if (max_candidates <= 0) throw ConfigError("sampler: max_candidates must be > 0");
  if (!(gradient_threshold >= 0.0)) throw ConfigError("sampler: gradient_threshold must be >= 0");
  if (!(max_gripper_width > 0.0)) throw ConfigError("sampler: max_gripper_width must be > 0");
}

Vec2 GraspCandidate::axis() const {
  const Vec2 d{static_cast<double>(jaw2.u - jaw1.u), static_cast<double>(jaw2.v - jaw1.v)};
  const double n = d.norm();
  return n > 0.0 ? Vec2{d.x / n, d.y / n} : Vec2{1.0, 0.0};
}

PixelCoord GraspCandidate::midpoint() const {
  return {0.5 * (jaw1.u + jaw2.u), 0.5 * (jaw1.v + jaw2.v)};
}

DepthGradient depth_gradient(const DepthImage& depth) {
  const int w = depth.width();
  const int h = depth.height();
  DepthGradient g{w, h, std::vector<double>(static_cast<std::size_t>(w) * h),
                  std::vector<double>(static_cast<std::size_t>(w) * h)};
  auto at = [&](int u, int v) { return depth.at(std::clamp(u, 0, w - 1), std::clamp(v, 0, h - 1)); };
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double gx = (at(u + 1, v - 1) - at(u - 1, v - 1)) + 2.0 * (at(u + 1, v) - at(u - 1, v)) +
                        (at(u + 1, v + 1) - at(u - 1, v + 1));
      const double gy = (at(u - 1, v + 1) - at(u - 1, v - 1)) + 2.0 * (at(u, v + 1) - at(u, v - 1)) +
                        (at(u + 1, v + 1) - at(u + 1, v - 1));
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      g.gx[i] = gx / 8.0;
      g.gy[i] = gy / 8.0;
    }
  }
  return g;
}

std::vector<EdgePixel> depth_edges(const DepthImage& depth, const SamplerConfig& cfg) {
  const DepthGradient g = depth_gradient(depth);
  std::vector<EdgePixel> edges;
  for (int v = 0; v < g.height; ++v) {
    for (int u = 0; u < g.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * g.width + u;
      const double m = std::hypot(g.gx[i], g.gy[i]);
      if (m > cfg.gradient_threshold) edges.push_back({{u, v}, {g.gx[i] / m, g.gy[i] / m}, m});
    }
  }
  return edges;
}

bool is_antipodal(Pixel p1, Vec2 n1, Pixel p2, Vec2 n2, double friction_coefficient) {
  const Vec2 d{static_cast<double>(p2.u - p1.u), static_cast<double>(p2.v - p1.v)};
  const double len = d.norm();
  if (len <= 0.0) return false;
  const Vec2 axis{d.x / len, d.y / len};
  const double cos_cone = std::cos(std::atan(friction_coefficient));
  const double a1 = n1.dot(axis);
  const double a2 = n2.dot(axis);
  return std::abs(a1) >= cos_cone && std::abs(a2) >= cos_cone && a1 * a2 < 0.0;
}

GraspCandidate make_candidate(const DepthImage& depth, const CameraIntrinsics& k, Pixel a, Vec2 na, Pixel b,
                              Vec2 nb) {
  if (b < a) {
    std::swap(a, b);
    std::swap(na, nb);
  }
  GraspCandidate g;
  g.jaw1 = a;
  g.jaw2 = b;
  g.jaw1_normal = na;
  g.jaw2_normal = nb;
  const PixelCoord mid = g.midpoint();
  g.center = {static_cast<int>(std::floor(mid.u + 0.5)), static_cast<int>(std::floor(mid.v + 0.5))};
  double angle = std::atan2(static_cast<double>(b.v - a.v), static_cast<double>(b.u - a.u));
  if (angle < 0.0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi) angle -= std::numbers::pi;
  g.axis_angle = angle;
  g.d0 = depth.at(g.center);
  g.jaw_separation_px = std::hypot(static_cast<double>(b.u - a.u), static_cast<double>(b.v - a.v));
  const double da = depth.at(a);
  const double db = depth.at(b);
  if (da > 0.0 && db > 0.0) {
    const Point3 pa = deproject(a.u, a.v, da, k);
    const Point3 pb = deproject(b.u, b.v, db, k);
    g.jaw_separation_m = std::sqrt((pa.x - pb.x) * (pa.x - pb.x) + (pa.y - pb.y) * (pa.y - pb.y) +
                                   (pa.z - pb.z) * (pa.z - pb.z));
  } else {
    g.jaw_separation_m = std::numeric_limits<double>::infinity();
  }
  return g;
}

std::vector<GraspCandidate> sample_antipodal(const DepthImage& depth, const CameraIntrinsics& k,
                                             const SamplerConfig& cfg, const std::optional<BoundingBox>& roi) {
  cfg.validate();
  std::vector<EdgePixel> edges = depth_edges(depth, cfg);
  if (roi) std::erase_if(edges, [&](const EdgePixel& e) { return !roi->contains(e.pixel); });

  std::vector<GraspCandidate> out;
  if (edges.size() < 2) return out;

  Rng rng(cfg.rng_seed);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  const long attempts = 100L * cfg.max_candidates;
  for (long t = 0; t < attempts && static_cast<int>(out.size()) < cfg.max_candidates; ++t) {
    const std::size_t i = uniform_index(rng, edges.size());
    const std::size_t j = uniform_index(rng, edges.size());
    if (i == j) continue;
    const EdgePixel& e1 = edges[i];
    const EdgePixel& e2 = edges[j];
    if (!is_antipodal(e1.pixel, e1.direction, e2.pixel, e2.direction, cfg.friction_coefficient)) continue;
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) continue;
    GraspCandidate g = make_candidate(depth, k, e1.pixel, e1.direction, e2.pixel, e2.direction);
    if (!(g.jaw_separation_m <= cfg.max_gripper_width) || !(g.d0 > 0.0)) continue;
    out.push_back(g);
  }
  return out;
}

}  // namespace parcelpick
