#include "parcelpick/detection.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "parcelpick/errors.hpp"

namespace parcelpick {

void DetectorConfig::validate() const {
  if (!(foreground_margin >= 0)) throw ConfigError("detector: foreground_margin must be >= 0");
  if (min_area < 1) throw ConfigError("detector: min_area must be >= 1");
  if (smoothing_px < 1 || smoothing_px % 2 == 0) throw ConfigError("detector: smoothing_px must be odd and >= 1");
  if (!(elevation_percentile >= 0 && elevation_percentile <= 1))
    throw ConfigError("detector: elevation_percentile must be in [0, 1]");
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<long>(rank - 1), values.end());
  return values[rank - 1];
}

double estimate_table_depth(const DepthImage& depth) {
  std::vector<double> valid;
  valid.reserve(depth.data().size());
  for (double d : depth.data())
    if (d > 0) valid.push_back(d);
  if (valid.empty()) throw EmptyDepthError("no valid depth to estimate the table from");
  const std::size_t mid = valid.size() / 2;
  std::nth_element(valid.begin(), valid.begin() + static_cast<long>(mid), valid.end());
  return valid[mid];
}

namespace {

// Median of the valid depths in the clipped (2r+1)^2 window, 0 if none.
double window_median(const DepthImage& depth, int u, int v, int r, std::vector<double>& win) {
  const int w = depth.width();
  const auto in = depth.data();
  win.clear();
  for (int y = std::max(0, v - r); y <= std::min(depth.height() - 1, v + r); ++y) {
    const double* row = in.data() + static_cast<std::size_t>(y) * w;
    for (int x = std::max(0, u - r); x <= std::min(w - 1, u + r); ++x)
      if (row[x] > 0.0) win.push_back(row[x]);
  }
  if (win.empty()) return 0.0;
  const auto mid = win.begin() + static_cast<long>(win.size() / 2);
  std::nth_element(win.begin(), mid, win.end());
  return *mid;
}

// Summed-area table of a per-pixel 0/1 predicate, (w+1) x (h+1).
template <typename Pred>
std::vector<int> integral_count(int w, int h, Pred pred) {
  std::vector<int> s(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      s[static_cast<std::size_t>(v + 1) * (w + 1) + u + 1] = pred(u, v) + s[static_cast<std::size_t>(v) * (w + 1) + u + 1] +
                                                             s[static_cast<std::size_t>(v + 1) * (w + 1) + u] -
                                                             s[static_cast<std::size_t>(v) * (w + 1) + u];
  return s;
}

int box_count(const std::vector<int>& s, int w, int x0, int y0, int x1, int y1) {
  const auto at = [&](int x, int y) { return s[static_cast<std::size_t>(y) * (w + 1) + x]; };
  return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0);
}

}  // namespace

DepthImage median_filter(const DepthImage& depth, int size) {
  if (size < 1 || size % 2 == 0) throw std::invalid_argument("median_filter: size must be odd and >= 1");
  std::vector<double> out(depth.data().size(), 0.0);
  std::vector<double> win;
  for (int v = 0; v < depth.height(); ++v)
    for (int u = 0; u < depth.width(); ++u)
      out[static_cast<std::size_t>(v) * depth.width() + u] = window_median(depth, u, v, size / 2, win);
  return DepthImage(depth.width(), depth.height(), std::move(out));
}

namespace {

void sort_detections(std::vector<Detection>& dets) {
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    const long aa = a.area();
    const long ab = b.area();
    if (aa != ab) return aa > ab;
    return std::tie(a.bbox.min.v, a.bbox.min.u) < std::tie(b.bbox.min.v, b.bbox.min.u);
  });
}

}  // namespace

std::vector<Detection> detect_packages(const ColorImage& color, const DepthImage& raw, const DetectorConfig& cfg) {
  cfg.validate();
  if (color.width() != raw.width() || color.height() != raw.height())
    throw RegistrationError("detect_packages: color and depth sizes differ");
  std::vector<Detection> out;
  bool any_valid = std::any_of(raw.data().begin(), raw.data().end(), [](double d) { return d > 0; });
  if (!any_valid) return out;
  const double table = estimate_table_depth(raw);
  const double threshold = table - cfg.foreground_margin;
  const int w = raw.width();
  const int h = raw.height();
  const int r = cfg.smoothing_px / 2;

  // A pixel is foreground when its window median is nearer than the
  // threshold, which holds exactly when more than half of the window's valid
  // depths are. Counting avoids a full median filter; medians are taken only
  // for blob pixels.
  const std::vector<int> n_valid = integral_count(w, h, [&](int u, int v) { return raw.valid(u, v); });
  const std::vector<int> n_near =
      integral_count(w, h, [&](int u, int v) { return raw.valid(u, v) && raw.at(u, v) < threshold; });
  auto fg = [&](int u, int v) {
    const int x0 = std::max(0, u - r), x1 = std::min(w - 1, u + r);
    const int y0 = std::max(0, v - r), y1 = std::min(h - 1, v + r);
    const int n = box_count(n_valid, w, x0, y0, x1, y1);
    return n > 0 && box_count(n_near, w, x0, y0, x1, y1) >= n / 2 + 1;
  };
  std::vector<double> win;
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Pixel> stack;
  int next = 0;
  for (int v0 = 0; v0 < h; ++v0) {
    for (int u0 = 0; u0 < w; ++u0) {
      if (!fg(u0, v0) || label[static_cast<std::size_t>(v0) * w + u0] >= 0) continue;
      const int id = next++;
      std::vector<Pixel> comp;
      stack.assign(1, {u0, v0});
      label[static_cast<std::size_t>(v0) * w + u0] = id;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.push_back(p);
        const Pixel nbrs[4] = {{p.u + 1, p.v}, {p.u - 1, p.v}, {p.u, p.v + 1}, {p.u, p.v - 1}};
        for (const Pixel& q : nbrs) {
          if (!raw.contains(q.u, q.v) || !fg(q.u, q.v)) continue;
          auto& l = label[static_cast<std::size_t>(q.v) * w + q.u];
          if (l >= 0) continue;
          l = id;
          stack.push_back(q);
        }
      }
      if (static_cast<int>(comp.size()) < cfg.min_area) continue;

      Detection d;
      d.mask = Mask(w, h);
      d.bbox = {comp.front(), comp.front()};
      std::vector<double> elevation;
      elevation.reserve(comp.size());
      for (const Pixel& p : comp) {
        d.mask->set(p.u, p.v);
        d.bbox.min = {std::min(d.bbox.min.u, p.u), std::min(d.bbox.min.v, p.v)};
        d.bbox.max = {std::max(d.bbox.max.u, p.u), std::max(d.bbox.max.v, p.v)};
        elevation.push_back(table - window_median(raw, p.u, p.v, r, win));
      }
      const double rise = percentile(std::move(elevation), cfg.elevation_percentile);
      d.cls = rise < cfg.envelope_max_elevation ? PackageClass::Envelope : PackageClass::Bag;
      d.confidence = 1.0;
      out.push_back(std::move(d));
    }
  }
  sort_detections(out);
  return out;
}

std::vector<Detection> GroundTruthDetector::detect(const ColorImage&, const DepthImage&) const {
  std::vector<Detection> out;
  if (!truth_) return out;
  for (const ObjectTruth& t : truth_->per_object) {
    Detection d;
    d.cls = t.cls;
    d.mask = Mask(truth_->width, truth_->height);
    bool any = false;
    for (int v = 0; v < truth_->height; ++v) {
      for (int u = 0; u < truth_->width; ++u) {
        if (truth_->visible_at(u, v) != t.id) continue;
        d.mask->set(u, v);
        if (!any) d.bbox = {{u, v}, {u, v}};
        any = true;
        d.bbox.min = {std::min(d.bbox.min.u, u), std::min(d.bbox.min.v, v)};
        d.bbox.max = {std::max(d.bbox.max.u, u), std::max(d.bbox.max.v, v)};
      }
    }
    if (!any || d.area() < min_area_) continue;
    out.push_back(std::move(d));
  }
  sort_detections(out);
  return out;
}

BarcodeObservation OracleBarcodeObserver::observe(const ObjectTruth* held) const { return observe_barcode(held); }

BarcodeObservation observe_barcode(const ObjectTruth* held) {
  if (!held) throw ProtocolError("barcode check requested with nothing in the gripper");
  BarcodeObservation obs;
  obs.present = held->barcode_up;
  if (obs.present) obs.bbox = held->label_bbox.value_or(BoundingBox{});
  return obs;
}

}  // namespace parcelpick
