#include "core/markers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tokenwarp {

namespace {

// 5x7 block font, A-Z, one row per byte (low 5 bits, MSB-left).
constexpr uint8_t kFont5x7[26][7] = {
    {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // A
    {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},  // B
    {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E},  // C
    {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C},  // D
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F},  // E
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},  // F
    {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F},  // G
    {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // H
    {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E},  // I
    {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C},  // J
    {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11},  // K
    {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F},  // L
    {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11},  // M
    {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11},  // N
    {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // O
    {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10},  // P
    {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D},  // Q
    {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11},  // R
    {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E},  // S
    {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},  // T
    {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E},  // U
    {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04},  // V
    {0x11, 0x11, 0x11, 0x15, 0x15, 0x1B, 0x11},  // W
    {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11},  // X
    {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04},  // Y
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F},  // Z
};

bool point_in_polygon(double px, double py, std::span<const Vec2> poly) {
  bool inside = false;
  size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    double xi = poly[i].x(), yi = poly[i].y();
    double xj = poly[j].x(), yj = poly[j].y();
    bool crosses = (yi > py) != (yj > py);
    if (crosses && px < (xj - xi) * (py - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

void fill_polygon(Image& image, std::span<const Vec2> poly, Rgb color) {
  double min_x = poly[0].x(), max_x = poly[0].x();
  double min_y = poly[0].y(), max_y = poly[0].y();
  for (const Vec2& v : poly) {
    min_x = std::min(min_x, v.x());
    max_x = std::max(max_x, v.x());
    min_y = std::min(min_y, v.y());
    max_y = std::max(max_y, v.y());
  }
  int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
  int x1 = std::min(image.width() - 1, static_cast<int>(std::ceil(max_x)));
  int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
  int y1 = std::min(image.height() - 1, static_cast<int>(std::ceil(max_y)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      if (point_in_polygon(x + 0.5, y + 0.5, poly)) {
        image.set_pixel(x, y, color);
      }
    }
  }
}

void draw_circle(Image& image, const MarkerSpec& m) {
  double r2 = m.size * m.size;
  int x0 = std::max(0, static_cast<int>(std::floor(m.position.x() - m.size - 1)));
  int x1 = std::min(image.width() - 1,
                    static_cast<int>(std::ceil(m.position.x() + m.size + 1)));
  int y0 = std::max(0, static_cast<int>(std::floor(m.position.y() - m.size - 1)));
  int y1 = std::min(image.height() - 1,
                    static_cast<int>(std::ceil(m.position.y() + m.size + 1)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      double dx = x + 0.5 - m.position.x();
      double dy = y + 0.5 - m.position.y();
      if (dx * dx + dy * dy <= r2) image.set_pixel(x, y, m.color);
    }
  }
}

void draw_triangle(Image& image, const MarkerSpec& m) {
  // Equilateral, apex up, circumradius = size.
  std::vector<Vec2> poly;
  for (int k = 0; k < 3; ++k) {
    double angle = -M_PI / 2.0 + k * 2.0 * M_PI / 3.0;
    poly.emplace_back(m.position.x() + m.size * std::cos(angle),
                      m.position.y() + m.size * std::sin(angle));
  }
  fill_polygon(image, poly, m.color);
}

void draw_star(Image& image, const MarkerSpec& m) {
  // 5-point star, apex up, inner radius at half the outer.
  std::vector<Vec2> poly;
  for (int k = 0; k < 10; ++k) {
    double r = (k % 2 == 0) ? m.size : 0.5 * m.size;
    double angle = -M_PI / 2.0 + k * M_PI / 5.0;
    poly.emplace_back(m.position.x() + r * std::cos(angle),
                      m.position.y() + r * std::sin(angle));
  }
  fill_polygon(image, poly, m.color);
}

void draw_letter(Image& image, const MarkerSpec& m) {
  char c = m.letter;
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  if (c < 'A' || c > 'Z') {
    fail(ErrorCode::kInvalidArgument, "letter markers support A-Z only");
  }
  const uint8_t* glyph = kFont5x7[c - 'A'];
  int scale = std::max(1, static_cast<int>(std::lround(2.0 * m.size / 7.0)));
  int gw = 5 * scale;
  int gh = 7 * scale;
  int x0 = static_cast<int>(std::lround(m.position.x())) - gw / 2;
  int y0 = static_cast<int>(std::lround(m.position.y())) - gh / 2;
  for (int row = 0; row < 7; ++row) {
    for (int col = 0; col < 5; ++col) {
      if (!(glyph[row] & (0x10 >> col))) continue;
      for (int dy = 0; dy < scale; ++dy) {
        for (int dx = 0; dx < scale; ++dx) {
          int x = x0 + col * scale + dx;
          int y = y0 + row * scale + dy;
          if (image.in_bounds(x, y)) image.set_pixel(x, y, m.color);
        }
      }
    }
  }
}

}  // namespace

const char* marker_kind_name(MarkerKind kind) {
  switch (kind) {
    case MarkerKind::kCircle: return "circle";
    case MarkerKind::kTriangle: return "triangle";
    case MarkerKind::kStar: return "star";
    case MarkerKind::kLetter: return "letter";
  }
  return "?";
}

MarkerKind marker_kind_from_name(const std::string& name) {
  if (name == "circle") return MarkerKind::kCircle;
  if (name == "triangle") return MarkerKind::kTriangle;
  if (name == "star") return MarkerKind::kStar;
  if (name == "letter") return MarkerKind::kLetter;
  fail(ErrorCode::kParseError, "unknown marker kind: " + name);
}

Image render_markers(const Image& image, std::span<const MarkerSpec> markers) {
  Image out = image;
  for (const MarkerSpec& m : markers) {
    if (m.position.x() < 0.0 || m.position.x() >= image.width() ||
        m.position.y() < 0.0 || m.position.y() >= image.height()) {
      fail(ErrorCode::kMarkerOutOfBounds, "marker center lies outside the image");
    }
    if (!(m.size > 0.0)) {
      fail(ErrorCode::kInvalidArgument, "marker size must be positive");
    }
    switch (m.kind) {
      case MarkerKind::kCircle: draw_circle(out, m); break;
      case MarkerKind::kTriangle: draw_triangle(out, m); break;
      case MarkerKind::kStar: draw_star(out, m); break;
      case MarkerKind::kLetter: draw_letter(out, m); break;
    }
  }
  return out;
}

}  // namespace tokenwarp
