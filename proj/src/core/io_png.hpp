#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace tokenwarp {

// PNG: 8-bit RGB images and 16-bit grayscale depth rasters (libpng).
Image load_png_rgb(const std::string& path);
void save_png_rgb(const Image& image, const std::string& path);

struct Gray16 {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> values;
};

Gray16 load_png_gray16(const std::string& path);
void save_png_gray16(const Gray16& raster, const std::string& path);

// PFM, grayscale "Pf": negative scale marks little-endian, rows are stored
// bottom-up (flipped on read/write).
DepthMap load_pfm(const std::string& path);
void save_pfm(const DepthMap& depth, const std::string& path);

// write-temp-then-rename helper shared by the binary writers.
void atomic_write_file(const std::string& path, const void* data, size_t size);

}  // namespace tokenwarp
