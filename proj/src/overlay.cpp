#include "parcelpick/overlay.hpp"

#include <algorithm>
#include <cmath>

namespace parcelpick {

namespace {

void plot(ColorImage& img, int u, int v, Rgb c) {
  if (u >= 0 && v >= 0 && u < img.width() && v < img.height()) img.set(u, v, c);
}

}  // namespace

void draw_line(ColorImage& img, PixelCoord a, PixelCoord b, Rgb color) {
  const double du = b.u - a.u;
  const double dv = b.v - a.v;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(du), std::abs(dv)))));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    plot(img, static_cast<int>(std::lround(a.u + t * du)), static_cast<int>(std::lround(a.v + t * dv)), color);
  }
}

void draw_circle(ColorImage& img, PixelCoord center, double radius, Rgb color) {
  const int steps = std::max(16, static_cast<int>(std::ceil(2 * M_PI * radius * 2)));
  for (int i = 0; i < steps; ++i) {
    const double a = 2 * M_PI * i / steps;
    plot(img, static_cast<int>(std::lround(center.u + radius * std::cos(a))),
         static_cast<int>(std::lround(center.v + radius * std::sin(a))), color);
  }
}

void draw_box(ColorImage& img, const BoundingBox& box, Rgb color) {
  const PixelCoord tl{static_cast<double>(box.min.u), static_cast<double>(box.min.v)};
  const PixelCoord tr{static_cast<double>(box.max.u), static_cast<double>(box.min.v)};
  const PixelCoord bl{static_cast<double>(box.min.u), static_cast<double>(box.max.v)};
  const PixelCoord br{static_cast<double>(box.max.u), static_cast<double>(box.max.v)};
  draw_line(img, tl, tr, color);
  draw_line(img, tr, br, color);
  draw_line(img, br, bl, color);
  draw_line(img, bl, tl, color);
}

void draw_grasp(ColorImage& img, const GraspCandidate& g, Rgb color) {
  const PixelCoord j1{static_cast<double>(g.jaw1.u), static_cast<double>(g.jaw1.v)};
  const PixelCoord j2{static_cast<double>(g.jaw2.u), static_cast<double>(g.jaw2.v)};
  draw_line(img, j1, j2, color);
  const Vec2 axis = g.axis();
  const double half_tick = 4.0;
  const double pu = -axis.y * half_tick;
  const double pv = axis.x * half_tick;
  for (const PixelCoord& j : {j1, j2}) draw_line(img, {j.u - pu, j.v - pv}, {j.u + pu, j.v + pv}, color);
}

void draw_suction(ColorImage& img, const SuctionCandidate& s, int radius_px, Rgb color) {
  const PixelCoord c{static_cast<double>(s.pixel.u), static_cast<double>(s.pixel.v)};
  draw_circle(img, c, radius_px, color);
  // A normal facing the camera has no image-plane component; scale so a 45
  // degree tilt reaches twice the radius.
  const double len = 2.0 * radius_px / std::sin(M_PI / 4);
  draw_line(img, c, {c.u + s.normal.x * len, c.v + s.normal.y * len}, color);
}

ColorImage render_overlay(const OverlaySpec& spec) {
  ColorImage img = spec.base;
  for (const Glyph& g : spec.glyphs) {
    if (const auto* gg = std::get_if<GraspGlyph>(&g))
      draw_grasp(img, gg->candidate, gg->color);
    else if (const auto* sg = std::get_if<SuctionGlyph>(&g))
      draw_suction(img, sg->candidate, sg->radius_px, sg->color);
    else if (const auto* bg = std::get_if<BoxGlyph>(&g))
      draw_box(img, bg->box, bg->color);
  }
  return img;
}

}  // namespace parcelpick
