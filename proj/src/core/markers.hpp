#pragma once

#include <span>
#include <vector>

#include "core/geometry.hpp"
#include "core/image.hpp"

namespace tokenwarp {

enum class MarkerKind : int {
  kCircle = 0,
  kTriangle = 1,
  kStar = 2,
  kLetter = 3,
};

struct MarkerSpec {
  MarkerKind kind = MarkerKind::kCircle;
  Vec2 position = Vec2::Zero();  // center, continuous pixels
  double size = 6.0;             // radius for shapes, half-height for letters
  Rgb color = {255, 0, 0};
  char letter = 'A';             // kLetter only, A-Z

  bool operator==(const MarkerSpec& other) const = default;
};

const char* marker_kind_name(MarkerKind kind);
MarkerKind marker_kind_from_name(const std::string& name);

// Draws procedural glyphs (filled circle, filled triangle, filled 5-point
// star, 5x7 bitmap letters) over a copy of the image. Deterministic pixels;
// shapes clip at the image border but every center must lie inside the
// image (MarkerOutOfBounds otherwise).
Image render_markers(const Image& image, std::span<const MarkerSpec> markers);

}  // namespace tokenwarp
