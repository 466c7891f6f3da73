#include "parcelpick/grasp_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parcelpick/errors.hpp"

namespace parcelpick {

void FilterThresholds::validate() const {
  for (double e : {eps1, eps2, eps3, eps4, eps5, eps6})
    if (!(e >= 0.0)) throw ConfigError("filter thresholds must be >= 0");
}

void RegionGeometry::validate() const {
  if (rect_height_px < 1) throw ConfigError("region: rect_height_px must be >= 1");
  if (jaw_window_px < 1 || jaw_window_px % 2 == 0) throw ConfigError("region: jaw_window_px must be odd and >= 1");
}

std::vector<Pixel> grasp_region(const GraspCandidate& g, const RegionGeometry& geom) {
  const PixelCoord m = g.midpoint();
  const Vec2 a = g.axis();
  const Vec2 n{-a.y, a.x};
  const double half_len = 0.5 * g.jaw_separation_px + 0.5;
  const double half_h = 0.5 * geom.rect_height_px;
  const double reach = std::hypot(half_len, half_h) + 1.0;

  std::vector<Pixel> out;
  const int u0 = static_cast<int>(std::floor(m.u - reach));
  const int u1 = static_cast<int>(std::ceil(m.u + reach));
  const int v0 = static_cast<int>(std::floor(m.v - reach));
  const int v1 = static_cast<int>(std::ceil(m.v + reach));
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      const double du = u - m.u;
      const double dv = v - m.v;
      const double s = du * a.x + dv * a.y;
      const double q = du * n.x + dv * n.y;
      if (s >= -half_len && s < half_len && q >= -half_h && q < half_h) out.push_back({u, v});
    }
  }
  return out;
}

namespace {

struct WindowMean {
  double depth = 0;
  RgbF color;
};

WindowMean window_mean(const DepthImage& depth, const ColorImage& color, Pixel c, int side) {
  const int r = side / 2;
  if (!depth.contains(c.u - r, c.v - r) || !depth.contains(c.u + r, c.v + r))
    throw OutOfBoundsError("jaw window leaves the image");
  WindowMean w;
  double n = 0;
  for (int v = c.v - r; v <= c.v + r; ++v) {
    for (int u = c.u - r; u <= c.u + r; ++u) {
      w.depth += depth.at(u, v);
      const Rgb px = color.at(u, v);
      w.color.r += px.r;
      w.color.g += px.g;
      w.color.b += px.b;
      n += 1;
    }
  }
  w.depth /= n;
  w.color = {w.color.r / n, w.color.g / n, w.color.b / n};
  return w;
}

}  // namespace

RegionStats region_stats(const DepthImage& depth, const ColorImage& color, const GraspCandidate& g,
                         const RegionGeometry& geom) {
  geom.validate();
  if (depth.width() != color.width() || depth.height() != color.height())
    throw RegistrationError("region_stats: color and depth sizes differ");
  const std::vector<Pixel> region = grasp_region(g, geom);
  for (const Pixel& p : region)
    if (!depth.contains(p.u, p.v)) throw OutOfBoundsError("grasp region leaves the image");

  RegionStats s;
  s.d0 = g.d0;
  const WindowMean w1 = window_mean(depth, color, g.jaw1, geom.jaw_window_px);
  const WindowMean w2 = window_mean(depth, color, g.jaw2, geom.jaw_window_px);
  s.d1 = w1.depth;
  s.d2 = w2.depth;
  s.c1 = w1.color;
  s.c2 = w2.color;

  const double n = static_cast<double>(region.size());
  s.region_pixels = region.size();
  double sum_d = 0, sum_l = 0;
  s.d_max = -std::numeric_limits<double>::infinity();
  s.d_min = std::numeric_limits<double>::infinity();
  for (const Pixel& p : region) {
    const double d = depth.at(p);
    const Rgb c = color.at(p);
    sum_d += d;
    s.d_max = std::max(s.d_max, d);
    s.d_min = std::min(s.d_min, d);
    s.mu_c.r += c.r;
    s.mu_c.g += c.g;
    s.mu_c.b += c.b;
    sum_l += luma(c.r, c.g, c.b);
  }
  s.mu_d = sum_d / n;
  s.mu_c = {s.mu_c.r / n, s.mu_c.g / n, s.mu_c.b / n};
  const double mean_l = sum_l / n;
  double var_d = 0, var_l = 0;
  for (const Pixel& p : region) {
    const double dd = depth.at(p) - s.mu_d;
    const Rgb c = color.at(p);
    const double dl = luma(c.r, c.g, c.b) - mean_l;
    var_d += dd * dd;
    var_l += dl * dl;
  }
  s.sigma_d = std::sqrt(var_d / n);
  s.sigma_c = std::sqrt(var_l / n);
  // Rounding in the running mean can push it a hair outside [min, max] for a
  // constant field.
  s.mu_d = std::clamp(s.mu_d, s.d_min, s.d_max);
  return s;
}

double jaw_color_difference(const RegionStats& s) {
  return ((s.c1.r - s.c2.r) + (s.c1.g - s.c2.g) + (s.c1.b - s.c2.b)) / 3.0;
}

FilterVerdict passes_filter(const RegionStats& s, const FilterThresholds& t) {
  FilterVerdict v;
  v.jaws_below_center = s.d1 > s.d0 + t.eps1 && s.d2 > s.d0 + t.eps1;
  v.depth_range = s.d_max - s.d_min > t.eps2;
  v.depth_spread = s.mu_d > s.d0 + t.eps3 && s.sigma_d > t.eps4;
  v.color_spread = s.sigma_c > t.eps5;
  const double diff = jaw_color_difference(s);
  v.jaw_color_contrast = (t.signed_color_difference ? diff : std::abs(diff)) > t.eps6;
  return v;
}

std::optional<std::size_t> FilterResult::most_violated() const {
  std::array<std::size_t, 5> fails{};
  bool any = false;
  for (const FilterRecord& r : records) {
    if (r.out_of_bounds) continue;
    any = true;
    const auto c = r.verdict.conditions();
    for (std::size_t i = 0; i < c.size(); ++i) fails[i] += c[i] ? 0 : 1;
  }
  if (!any) return std::nullopt;
  return static_cast<std::size_t>(std::max_element(fails.begin(), fails.end()) - fails.begin());
}

FilterResult filter_grasps(const std::vector<GraspCandidate>& candidates, const DepthImage& depth,
                           const ColorImage& color, const RegionGeometry& geom, const FilterThresholds& t) {
  t.validate();
  FilterResult result;
  result.records.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    FilterRecord rec;
    rec.index = i;
    try {
      rec.stats = region_stats(depth, color, candidates[i], geom);
      rec.verdict = passes_filter(*rec.stats, t);
      if (rec.verdict.passed()) result.kept.push_back(candidates[i]);
    } catch (const OutOfBoundsError&) {
      rec.out_of_bounds = true;
      ++result.out_of_bounds;
    }
    result.records.push_back(rec);
  }
  return result;
}

}  // namespace parcelpick
