#pragma once

#include <variant>
#include <vector>

#include "parcelpick/imaging.hpp"
#include "parcelpick/sampling.hpp"
#include "parcelpick/suction.hpp"

namespace parcelpick {

inline constexpr Rgb kPassColor{0, 220, 0};
inline constexpr Rgb kFailColor{220, 0, 0};
inline constexpr Rgb kSelectedColor{255, 230, 0};
inline constexpr Rgb kBoxColor{0, 160, 255};

struct GraspGlyph {
  GraspCandidate candidate;
  Rgb color = kPassColor;
};

struct SuctionGlyph {
  SuctionCandidate candidate;
  int radius_px = 7;
  Rgb color = kPassColor;
};

struct BoxGlyph {
  BoundingBox box;
  Rgb color = kBoxColor;
};

using Glyph = std::variant<GraspGlyph, SuctionGlyph, BoxGlyph>;

struct OverlaySpec {
  ColorImage base;
  std::vector<Glyph> glyphs;
};

// Primitives clip to the image; nothing is ever written outside it.
void draw_line(ColorImage& img, PixelCoord a, PixelCoord b, Rgb color);
void draw_circle(ColorImage& img, PixelCoord center, double radius, Rgb color);
void draw_box(ColorImage& img, const BoundingBox& box, Rgb color);

/// Jaw-to-jaw segment with a short tick across the axis at each jaw.
void draw_grasp(ColorImage& img, const GraspCandidate& g, Rgb color);
/// Contact circle plus the surface normal's image-plane direction.
void draw_suction(ColorImage& img, const SuctionCandidate& s, int radius_px, Rgb color);

ColorImage render_overlay(const OverlaySpec& spec);

}  // namespace parcelpick
