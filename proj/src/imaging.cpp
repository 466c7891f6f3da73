#include "parcelpick/imaging.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "parcelpick/errors.hpp"

namespace parcelpick {

double Vec2::norm() const { return std::hypot(x, y); }

std::size_t Mask::count() const {
  std::size_t n = 0;
  for (auto b : data_) n += b != 0;
  return n;
}

DepthImage::DepthImage(int width, int height, double fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  if (!std::isfinite(fill) || fill < 0.0) throw std::invalid_argument("depth fill must be finite and >= 0");
}

DepthImage::DepthImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("depth data length does not match width*height");
  for (double d : data_)
    if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("depth values must be finite and >= 0");
}

void DepthImage::set(int u, int v, double depth) {
  if (!std::isfinite(depth) || depth < 0.0) throw std::invalid_argument("depth values must be finite and >= 0");
  data_[index(u, v)] = depth;
}

ColorImage::ColorImage(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  data_.resize(3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

ColorImage::ColorImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  if (data_.size() != 3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("color data length does not match 3*width*height");
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("intrinsics: fx and fy must be positive");
  if (width <= 0 || height <= 0) throw ConfigError("intrinsics: width and height must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
    throw ConfigError("intrinsics: principal point outside the image");
}

Point3 deproject(double u, double v, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) throw InvalidDepthError("deproject: depth must be > 0");
  return {(u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth};
}

PixelCoord project(const Point3& p, const CameraIntrinsics& k) {
  if (!(p.z > 0.0)) throw BehindCameraError("project: point is not in front of the camera");
  return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

namespace {

constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Exact squared Euclidean distance to the nearest valid pixel (two-pass
// lower-envelope transform).
std::vector<std::int64_t> squared_distance_to_valid(const DepthImage& depth) {
  const int w = depth.width();
  const int h = depth.height();
  std::vector<std::int64_t> col(static_cast<std::size_t>(w) * h, kFar);

  for (int u = 0; u < w; ++u) {
    std::int64_t last = -1;
    for (int v = 0; v < h; ++v) {
      if (depth.valid(u, v)) last = v;
      if (last >= 0) col[static_cast<std::size_t>(v) * w + u] = (v - last) * (v - last);
    }
    last = -1;
    for (int v = h - 1; v >= 0; --v) {
      if (depth.valid(u, v)) last = v;
      if (last >= 0) {
        auto& c = col[static_cast<std::size_t>(v) * w + u];
        c = std::min(c, (last - v) * (last - v));
      }
    }
  }

  std::vector<std::int64_t> out(col.size(), kFar);
  std::vector<int> sites(w);
  std::vector<double> bounds(w + 1);
  for (int v = 0; v < h; ++v) {
    const std::int64_t* f = col.data() + static_cast<std::size_t>(v) * w;
    int k = -1;
    for (int q = 0; q < w; ++q) {
      if (f[q] >= kFar) continue;
      if (k < 0) {
        k = 0;
        sites[0] = q;
        bounds[0] = -std::numeric_limits<double>::infinity();
        bounds[1] = std::numeric_limits<double>::infinity();
        continue;
      }
      auto intersect = [&](int p) {
        return (static_cast<double>(f[q] + std::int64_t{q} * q) - static_cast<double>(f[p] + std::int64_t{p} * p)) /
               (2.0 * (q - p));
      };
      // bounds[0] is -inf, so the loop always stops at k == 0.
      double s = intersect(sites[k]);
      while (s <= bounds[k]) s = intersect(sites[--k]);
      ++k;
      sites[k] = q;
      bounds[k] = s;
      bounds[k + 1] = std::numeric_limits<double>::infinity();
    }
    if (k < 0) continue;
    int j = 0;
    for (int u = 0; u < w; ++u) {
      while (bounds[j + 1] < u) ++j;
      const std::int64_t du = u - sites[j];
      out[static_cast<std::size_t>(v) * w + u] = du * du + f[sites[j]];
    }
  }
  return out;
}

}  // namespace

DepthImage inpaint_invalid(const DepthImage& depth) {
  const int w = depth.width();
  const int h = depth.height();
  bool any_valid = false;
  bool any_invalid = false;
  for (double d : depth.data()) {
    any_valid |= d > 0.0;
    any_invalid |= !(d > 0.0);
  }
  if (!any_valid) throw EmptyDepthError("inpaint_invalid: image has no valid depth");
  if (!any_invalid) return depth;

  const auto dist2 = squared_distance_to_valid(depth);
  DepthImage out = depth;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (depth.valid(u, v)) continue;
      const std::int64_t d2 = dist2[static_cast<std::size_t>(v) * w + u];
      const std::int64_t r = isqrt(d2);
      // Enumerate lattice points on the circle of radius sqrt(d2) in
      // (row, column) order; the first valid one is the answer.
      bool filled = false;
      for (std::int64_t dv = -r; dv <= r && !filled; ++dv) {
        const std::int64_t rem = d2 - dv * dv;
        const std::int64_t du = isqrt(rem);
        if (du * du != rem) continue;
        const int vv = v + static_cast<int>(dv);
        for (const std::int64_t cand : {-du, du}) {
          const int uu = u + static_cast<int>(cand);
          if (depth.contains(uu, vv) && depth.valid(uu, vv)) {
            out.set(u, v, depth.at(uu, vv));
            filled = true;
            break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace parcelpick
