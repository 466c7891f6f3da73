#include "parcelpick/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "parcelpick/errors.hpp"
#include "parcelpick/random.hpp"

namespace parcelpick {

std::string to_string(PackageClass c) { return c == PackageClass::Bag ? "bag" : "envelope"; }

PackageClass parse_package_class(const std::string& s) {
  if (s == "bag") return PackageClass::Bag;
  if (s == "envelope") return PackageClass::Envelope;
  throw std::invalid_argument("unknown package class: " + s);
}

void SceneObject::validate() const {
  if (!(half_a > 0) || !(half_b > 0)) throw std::invalid_argument("object footprint must be positive");
  if (cls == PackageClass::Bag) {
    if (!(flap_band >= 0) || flap_band >= std::min(half_a, half_b))
      throw std::invalid_argument("bag flap band must be smaller than the footprint");
    if (!(lump_height > kSheetThickness)) throw std::invalid_argument("bag lump must be taller than the sheet");
    if (!(corner_lip_height >= 0)) throw std::invalid_argument("corner lip height must be >= 0");
  }
}

bool polygon_contains(const Polygon& poly, double u, double v) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const PixelCoord& a = poly[i];
    const PixelCoord& b = poly[j];
    if ((a.v > v) != (b.v > v) && u < (b.u - a.u) * (v - a.v) / (b.v - a.v) + a.u) inside = !inside;
  }
  return inside;
}

const ObjectTruth* SceneTruth::find(int id) const {
  for (const auto& t : per_object)
    if (t.id == id) return &t;
  return nullptr;
}

const SceneObject* SceneTruth::find_object(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

bool SceneTruth::in_corner_region(double u, double v) const {
  for (const auto& t : per_object)
    for (const auto& poly : t.corner_regions)
      if (polygon_contains(poly, u, v)) return true;
  return false;
}

bool SceneTruth::in_lump(int u, int v) const {
  for (const auto& t : per_object)
    if (t.cls == PackageClass::Bag && t.lump.test(u, v)) return true;
  return false;
}

namespace {

struct Local {
  double x;
  double y;
};

Local to_local(const SceneObject& o, double x, double y) {
  const double c = std::cos(o.pose.yaw);
  const double s = std::sin(o.pose.yaw);
  const double dx = x - o.pose.x;
  const double dy = y - o.pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Local to_world(const SceneObject& o, double x, double y) {
  const double c = std::cos(o.pose.yaw);
  const double s = std::sin(o.pose.yaw);
  return {o.pose.x + c * x - s * y, o.pose.y + s * x + c * y};
}

double lump_local(const SceneObject& o, double x, double y) {
  const double ai = o.half_a - o.flap_band;
  const double bi = o.half_b - o.flap_band;
  if (std::abs(x) >= ai || std::abs(y) >= bi) return 0.0;
  const double rx = x / ai;
  const double ry = y / bi;
  const double r4 = rx * rx * rx * rx + ry * ry * ry * ry;
  return o.lump_height * std::max(0.0, 1.0 - r4);
}

// Curl of the corner flap: a ridge parallel to the corner's cut line.
double lip_local(const SceneObject& o, double x, double y) {
  const double s = (o.half_a - std::abs(x)) + (o.half_b - std::abs(y));
  const double across = std::abs(s - kLipOffset) / std::numbers::sqrt2;
  if (across >= kLipHalfWidth) return 0.0;
  const double t = 1.0 - across / kLipHalfWidth;
  return o.corner_lip_height * t * t;
}

bool in_label(const SceneObject& o, double x, double y) {
  const double a = o.cls == PackageClass::Bag ? o.half_a - o.flap_band : o.half_a;
  const double b = o.cls == PackageClass::Bag ? o.half_b - o.flap_band : o.half_b;
  return std::abs(x) < 0.3 * a && std::abs(y) < 0.25 * b;
}

Rgb surface_color(const SceneObject& o, double x, double y, double lip) {
  if (o.barcode_up && in_label(o, x, y)) {
    const double a = o.cls == PackageClass::Bag ? o.half_a - o.flap_band : o.half_a;
    const int stripe = static_cast<int>(std::floor((x + 0.3 * a) / 0.005));
    return stripe % 2 == 0 ? Rgb{20, 20, 20} : Rgb{250, 250, 250};
  }
  if (o.cls == PackageClass::Bag) {
    const bool band = std::abs(x) > o.half_a - o.flap_band || std::abs(y) > o.half_b - o.flap_band;
    if (band || lip > 0.002) return o.label_color;
  }
  return o.color;
}

BoundingBox pixel_bbox(const std::vector<PixelCoord>& pts) {
  double u0 = pts[0].u, u1 = pts[0].u, v0 = pts[0].v, v1 = pts[0].v;
  for (const auto& p : pts) {
    u0 = std::min(u0, p.u);
    u1 = std::max(u1, p.u);
    v0 = std::min(v0, p.v);
    v1 = std::max(v1, p.v);
  }
  return {{static_cast<int>(std::floor(u0)), static_cast<int>(std::floor(v0))},
          {static_cast<int>(std::ceil(u1)), static_cast<int>(std::ceil(v1))}};
}

PixelCoord project_table(const SceneObject& o, double lx, double ly, const CameraIntrinsics& k, double table) {
  const Local w = to_world(o, lx, ly);
  return project({w.x, w.y, table}, k);
}

std::vector<PixelCoord> footprint_corners(const SceneObject& o, const CameraIntrinsics& k, double table) {
  return {project_table(o, -o.half_a, -o.half_b, k, table), project_table(o, o.half_a, -o.half_b, k, table),
          project_table(o, o.half_a, o.half_b, k, table), project_table(o, -o.half_a, o.half_b, k, table)};
}

}  // namespace

std::optional<double> object_elevation(const SceneObject& o, double x, double y) {
  const Local l = to_local(o, x, y);
  if (std::abs(l.x) > o.half_a || std::abs(l.y) > o.half_b) return std::nullopt;
  if (o.cls == PackageClass::Envelope) return kSheetThickness;
  const double lump = lump_local(o, l.x, l.y);
  const double lip = lump > 0.0 ? 0.0 : lip_local(o, l.x, l.y);
  return kSheetThickness + std::max(lump, lip);
}

double lump_elevation(const SceneObject& o, double x, double y) {
  if (o.cls != PackageClass::Bag) return 0.0;
  const Local l = to_local(o, x, y);
  return lump_local(o, l.x, l.y);
}

Mask footprint_mask(const SceneObject& o, const CameraIntrinsics& k, double table_depth) {
  Mask m(k.width, k.height);
  const BoundingBox box = pixel_bbox(footprint_corners(o, k, table_depth));
  for (int v = std::max(0, box.min.v); v <= std::min(k.height - 1, box.max.v); ++v) {
    for (int u = std::max(0, box.min.u); u <= std::min(k.width - 1, box.max.u); ++u) {
      const Local l = to_local(o, (u - k.cx) * table_depth / k.fx, (v - k.cy) * table_depth / k.fy);
      if (std::abs(l.x) <= o.half_a && std::abs(l.y) <= o.half_b) m.set(u, v);
    }
  }
  return m;
}

RenderedScene render_scene(const std::vector<SceneObject>& objects, const CameraIntrinsics& k,
                           const RenderOptions& opts) {
  k.validate();
  const int w = k.width;
  const int h = k.height;
  const double table = opts.table_depth;

  std::vector<BoundingBox> boxes;
  RenderedScene out{ColorImage(w, h, opts.table_color), DepthImage(w, h, table), {}};
  SceneTruth& truth = out.truth;
  truth.objects = objects;
  truth.width = w;
  truth.height = h;
  truth.table_depth = table;
  truth.visible_id.assign(static_cast<std::size_t>(w) * h, -1);

  for (const SceneObject& o : objects) {
    o.validate();
    const auto corners = footprint_corners(o, k, table);
    for (const auto& c : corners)
      if (c.u < 0 || c.v < 0 || c.u > w - 1 || c.v > h - 1)
        throw FrustumError("object " + std::to_string(o.id) + " is not fully inside the camera view");
    boxes.push_back(pixel_bbox(corners));

    ObjectTruth t;
    t.id = o.id;
    t.cls = o.cls;
    t.barcode_up = o.barcode_up;
    t.footprint = footprint_mask(o, k, table);
    t.lump = Mask(w, h);
    if (o.cls == PackageClass::Bag) {
      const double reach = kLipOffset + std::numbers::sqrt2 * kLipHalfWidth;
      for (int sx : {1, -1}) {
        for (int sy : {1, -1}) {
          // Corners in the order (+,+), (+,-), (-,+), (-,-).
          t.corner_regions.push_back(
              {project_table(o, sx * o.half_a, sy * o.half_b, k, table),
               project_table(o, sx * (o.half_a - reach), sy * o.half_b, k, table),
               project_table(o, sx * o.half_a, sy * (o.half_b - reach), k, table)});
        }
      }
    }
    if (o.barcode_up) {
      const double a = (o.cls == PackageClass::Bag ? o.half_a - o.flap_band : o.half_a) * 0.3;
      const double b = (o.cls == PackageClass::Bag ? o.half_b - o.flap_band : o.half_b) * 0.25;
      t.label_bbox = pixel_bbox({project_table(o, -a, -b, k, table), project_table(o, a, -b, k, table),
                                 project_table(o, a, b, k, table), project_table(o, -a, b, k, table)});
    }
    truth.per_object.push_back(std::move(t));
  }

  for (int v = 0; v < h; ++v) {
    const double y = (v - k.cy) * table / k.fy;
    for (int u = 0; u < w; ++u) {
      const double x = (u - k.cx) * table / k.fx;
      int top = -1;
      double top_e = 0.0;
      for (std::size_t i = 0; i < objects.size(); ++i) {
        if (!boxes[i].contains({u, v})) continue;
        const auto e = object_elevation(objects[i], x, y);
        if (!e) continue;
        if (top < 0 || *e >= top_e) {
          top = static_cast<int>(i);
          top_e = *e;
        }
        if (lump_elevation(objects[i], x, y) > 0.0) truth.per_object[i].lump.set(u, v);
      }
      if (top < 0) continue;
      const SceneObject& o = objects[top];
      const Local l = to_local(o, x, y);
      const double lip = o.cls == PackageClass::Bag && lump_local(o, l.x, l.y) <= 0.0 ? lip_local(o, l.x, l.y) : 0.0;
      out.depth.set(u, v, table - top_e);
      out.color.set(u, v, surface_color(o, l.x, l.y, lip));
      truth.visible_id[static_cast<std::size_t>(v) * w + u] = o.id;
      ++truth.per_object[top].visible_pixels;
    }
  }

  if (opts.noise_sigma > 0.0) {
    Rng rng(opts.noise_seed);
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        out.depth.set(u, v, std::max(0.0, out.depth.at(u, v) + opts.noise_sigma * standard_normal(rng)));
  }
  return out;
}

double overlap_fraction(const Mask& a, const Mask& b) {
  std::size_t na = 0, nb = 0, both = 0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    na += da[i] != 0;
    nb += db[i] != 0;
    both += (da[i] != 0 && db[i] != 0);
  }
  const std::size_t m = std::min(na, nb);
  return m == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(m);
}

std::vector<SceneObject> random_scene(int n_bags, int n_envelopes, std::uint64_t seed, const CameraIntrinsics& k,
                                      const RandomSceneOptions& opts) {
  if (n_bags < 0 || n_envelopes < 0) throw std::invalid_argument("object counts must be >= 0");
  k.validate();
  // Light mailer plastics; each channel mean is within 35 of both labels.
  static constexpr std::array<Rgb, 4> kBagColors = {Rgb{215, 215, 220}, Rgb{205, 200, 185}, Rgb{200, 210, 230},
                                                    Rgb{225, 215, 200}};
  static constexpr std::array<Rgb, 2> kLabelColors = {Rgb{235, 235, 225}, Rgb{240, 230, 200}};
  static constexpr std::array<Rgb, 2> kEnvelopeColors = {Rgb{190, 160, 110}, Rgb{225, 225, 230}};

  Rng rng(seed);
  std::vector<SceneObject> placed;
  std::vector<Mask> masks;
  int rejections = 0;
  const double t = opts.table_depth;
  const double x_lo = (opts.margin_px - k.cx) * t / k.fx;
  const double x_hi = (k.width - 1 - opts.margin_px - k.cx) * t / k.fx;
  const double y_lo = (opts.margin_px - k.cy) * t / k.fy;
  const double y_hi = (k.height - 1 - opts.margin_px - k.cy) * t / k.fy;

  for (int n = 0; n < n_bags + n_envelopes; ++n) {
    const bool bag = n < n_bags;
    while (true) {
      SceneObject o;
      o.id = n + 1;
      o.cls = bag ? PackageClass::Bag : PackageClass::Envelope;
      if (bag) {
        o.half_a = uniform(rng, 0.12, 0.16);
        o.half_b = uniform(rng, 0.08, 0.11);
        o.lump_height = uniform(rng, 0.035, 0.045);
        o.flap_band = 0.02;
        o.corner_lip_height = 0.04;
        o.color = kBagColors[uniform_index(rng, kBagColors.size())];
        o.label_color = kLabelColors[uniform_index(rng, kLabelColors.size())];
      } else {
        o.half_a = uniform(rng, 0.10, 0.14);
        o.half_b = uniform(rng, 0.07, 0.09);
        o.lump_height = 0;
        o.flap_band = 0;
        o.corner_lip_height = 0;
        o.color = kEnvelopeColors[uniform_index(rng, kEnvelopeColors.size())];
        o.label_color = {250, 250, 250};
      }
      o.barcode_up = bernoulli(rng, 0.5);
      o.pose.yaw = uniform(rng, 0.0, std::numbers::pi);
      const double r = std::hypot(o.half_a, o.half_b);
      if (x_hi - x_lo <= 2 * r || y_hi - y_lo <= 2 * r)
        throw PlacementError("object does not fit inside the workspace");
      o.pose.x = uniform(rng, x_lo + r, x_hi - r);
      o.pose.y = uniform(rng, y_lo + r, y_hi - r);

      Mask m = footprint_mask(o, k, t);
      bool ok = true;
      for (const Mask& other : masks)
        if (overlap_fraction(m, other) > opts.max_overlap) ok = false;
      if (ok) {
        placed.push_back(o);
        masks.push_back(std::move(m));
        break;
      }
      if (++rejections > opts.max_rejections)
        throw PlacementError("could not place " + std::to_string(n_bags + n_envelopes) + " objects after " +
                             std::to_string(opts.max_rejections) + " rejections");
    }
  }
  return placed;
}

}  // namespace parcelpick
