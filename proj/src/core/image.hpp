#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/error.hpp"
#include "core/geometry.hpp"

namespace tokenwarp {

using Rgb = std::array<uint8_t, 3>;

// 8-bit RGB raster, row-major.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {0, 0, 0});
  Image(int width, int height, std::vector<uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  Rgb pixel(int x, int y) const;
  void set_pixel(int x, int y, Rgb value);
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  // Bilinear sample at a continuous coordinate; pixel centers sit at
  // (u + 0.5, v + 0.5) and borders clamp. Exact at pixel centers.
  std::array<double, 3> bilinear(double x, double y) const;

  // Nearest-pixel read with border clamp.
  Rgb nearest(double x, double y) const;

  const std::vector<uint8_t>& data() const { return data_; }
  std::vector<uint8_t>& data() { return data_; }

  bool operator==(const Image& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> data_;  // width*height*3
};

// Per-pixel metric depth in meters. A sample is invalid when it is
// non-positive or non-finite (the 16-bit zero-fill convention maps to 0).
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, float fill = 0.f);
  DepthMap(int width, int height, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return values_.empty(); }

  float value(int x, int y) const;
  void set_value(int x, int y, float v);
  bool valid(int x, int y) const;

  // Depth at the pixel containing a continuous coordinate (no interpolation;
  // bilinear depth across discontinuities would fabricate unreachable
  // depths). Returns <= 0 when the read lands on an invalid sample.
  float at_nearest(const Vec2& coord) const;

  int valid_count() const;

  const std::vector<float>& values() const { return values_; }

  bool operator==(const DepthMap& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

// Containing pixel of a continuous coordinate, clamped into the raster.
inline int nearest_pixel(double coord, int extent) {
  int i = static_cast<int>(std::floor(coord));
  if (i < 0) return 0;
  if (i >= extent) return extent - 1;
  return i;
}

}  // namespace tokenwarp
