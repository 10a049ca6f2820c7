#include "core/image.hpp"

#include <algorithm>
#include <cmath>

namespace tokenwarp {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
  data_.resize(static_cast<size_t>(width) * height * 3);
  for (size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

Image::Image(int width, int height, std::vector<uint8_t> rgb)
    : width_(width), height_(height), data_(std::move(rgb)) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
  }
  if (data_.size() != static_cast<size_t>(width) * height * 3) {
    fail(ErrorCode::kDimensionMismatch, "pixel buffer size does not match dimensions");
  }
}

Rgb Image::pixel(int x, int y) const {
  size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set_pixel(int x, int y, Rgb value) {
  size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
  data_[i] = value[0];
  data_[i + 1] = value[1];
  data_[i + 2] = value[2];
}

std::array<double, 3> Image::bilinear(double x, double y) const {
  double fx = x - 0.5;
  double fy = y - 0.5;
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  double ax = fx - x0;
  double ay = fy - y0;
  auto clampx = [this](int v) { return std::clamp(v, 0, width_ - 1); };
  auto clampy = [this](int v) { return std::clamp(v, 0, height_ - 1); };
  Rgb p00 = pixel(clampx(x0), clampy(y0));
  Rgb p10 = pixel(clampx(x0 + 1), clampy(y0));
  Rgb p01 = pixel(clampx(x0), clampy(y0 + 1));
  Rgb p11 = pixel(clampx(x0 + 1), clampy(y0 + 1));
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    double top = p00[c] * (1.0 - ax) + p10[c] * ax;
    double bot = p01[c] * (1.0 - ax) + p11[c] * ax;
    out[c] = top * (1.0 - ay) + bot * ay;
  }
  return out;
}

Rgb Image::nearest(double x, double y) const {
  return pixel(nearest_pixel(x, width_), nearest_pixel(y, height_));
}

DepthMap::DepthMap(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidArgument, "depth dimensions must be positive");
  }
  values_.assign(static_cast<size_t>(width) * height, fill);
}

DepthMap::DepthMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidArgument, "depth dimensions must be positive");
  }
  if (values_.size() != static_cast<size_t>(width) * height) {
    fail(ErrorCode::kDimensionMismatch, "depth buffer size does not match dimensions");
  }
}

float DepthMap::value(int x, int y) const {
  return values_[static_cast<size_t>(y) * width_ + x];
}

void DepthMap::set_value(int x, int y, float v) {
  values_[static_cast<size_t>(y) * width_ + x] = v;
}

bool DepthMap::valid(int x, int y) const {
  float v = value(x, y);
  return v > 0.f && std::isfinite(v);
}

float DepthMap::at_nearest(const Vec2& coord) const {
  int x = nearest_pixel(coord.x(), width_);
  int y = nearest_pixel(coord.y(), height_);
  return valid(x, y) ? value(x, y) : 0.f;
}

int DepthMap::valid_count() const {
  int n = 0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (valid(x, y)) ++n;
    }
  }
  return n;
}

}  // namespace tokenwarp
