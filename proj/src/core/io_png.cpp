#include "core/io_png.hpp"

#include <png.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace tokenwarp {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void io_fail(const std::string& path, const char* what) {
  fail(ErrorCode::kIoError, path + ": " + what);
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

void open_reader(PngReader& r, FILE* f, const std::string& path) {
  uint8_t header[8];
  if (std::fread(header, 1, 8, f) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    fail(ErrorCode::kParseError, path + ": not a PNG file");
  }
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) io_fail(path, "png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) io_fail(path, "png_create_info_struct failed");
  png_init_io(r.png, f);
  png_set_sig_bytes(r.png, 8);
}

}  // namespace

Image load_png_rgb(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) io_fail(path, "cannot open for reading");
  PngReader r;
  open_reader(r, f.get(), path);
  if (setjmp(png_jmpbuf(r.png))) {
    fail(ErrorCode::kParseError, path + ": corrupt PNG data");
  }
  png_read_info(r.png, r.info);

  png_set_strip_16(r.png);
  png_set_expand(r.png);
  png_set_strip_alpha(r.png);
  png_set_gray_to_rgb(r.png);
  png_read_update_info(r.png, r.info);

  int width = static_cast<int>(png_get_image_width(r.png, r.info));
  int height = static_cast<int>(png_get_image_height(r.png, r.info));
  if (png_get_channels(r.png, r.info) != 3) {
    fail(ErrorCode::kParseError, path + ": unsupported PNG channel layout");
  }

  std::vector<uint8_t> data(static_cast<size_t>(width) * height * 3);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = data.data() + static_cast<size_t>(y) * width * 3;
  }
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
  return Image(width, height, std::move(data));
}

void save_png_rgb(const Image& image, const std::string& path) {
  if (image.empty()) {
    fail(ErrorCode::kInvalidArgument, "cannot save an empty image");
  }
  std::string tmp = path + ".tmp";
  {
    FilePtr f(std::fopen(tmp.c_str(), "wb"));
    if (!f) io_fail(tmp, "cannot open for writing");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) io_fail(path, "png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) io_fail(path, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) {
      io_fail(path, "PNG write failed");
    }
    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, image.width(), image.height(), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    for (int y = 0; y < image.height(); ++y) {
      png_write_row(w.png, const_cast<png_bytep>(
                               image.data().data() +
                               static_cast<size_t>(y) * image.width() * 3));
    }
    png_write_end(w.png, nullptr);
  }
  std::filesystem::rename(tmp, path);
}

Gray16 load_png_gray16(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) io_fail(path, "cannot open for reading");
  PngReader r;
  open_reader(r, f.get(), path);
  if (setjmp(png_jmpbuf(r.png))) {
    fail(ErrorCode::kParseError, path + ": corrupt PNG data");
  }
  png_read_info(r.png, r.info);
  if (png_get_bit_depth(r.png, r.info) != 16 ||
      png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY) {
    fail(ErrorCode::kParseError, path + ": expected 16-bit grayscale PNG");
  }
  if constexpr (std::endian::native == std::endian::little) {
    png_set_swap(r.png);
  }
  png_read_update_info(r.png, r.info);

  Gray16 out;
  out.width = static_cast<int>(png_get_image_width(r.png, r.info));
  out.height = static_cast<int>(png_get_image_height(r.png, r.info));
  out.values.resize(static_cast<size_t>(out.width) * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) {
    rows[y] = reinterpret_cast<png_bytep>(out.values.data() +
                                          static_cast<size_t>(y) * out.width);
  }
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
  return out;
}

void save_png_gray16(const Gray16& raster, const std::string& path) {
  if (raster.width <= 0 || raster.height <= 0 ||
      raster.values.size() != static_cast<size_t>(raster.width) * raster.height) {
    fail(ErrorCode::kInvalidArgument, "invalid 16-bit raster");
  }
  std::string tmp = path + ".tmp";
  {
    FilePtr f(std::fopen(tmp.c_str(), "wb"));
    if (!f) io_fail(tmp, "cannot open for writing");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) io_fail(path, "png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) io_fail(path, "png_create_info_struct failed");
    if (setjmp(png_jmpbuf(w.png))) {
      io_fail(path, "PNG write failed");
    }
    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, raster.width, raster.height, 16,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    if constexpr (std::endian::native == std::endian::little) {
      png_set_swap(w.png);
    }
    for (int y = 0; y < raster.height; ++y) {
      png_write_row(w.png,
                    reinterpret_cast<png_bytep>(const_cast<uint16_t*>(
                        raster.values.data() +
                        static_cast<size_t>(y) * raster.width)));
    }
    png_write_end(w.png, nullptr);
  }
  std::filesystem::rename(tmp, path);
}

DepthMap load_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  std::string magic;
  in >> magic;
  if (magic != "Pf") {
    fail(ErrorCode::kParseError, path + ": expected grayscale PFM (Pf)");
  }
  int width = 0, height = 0;
  double scale = 0.0;
  in >> width >> height >> scale;
  if (!in || width <= 0 || height <= 0 || scale == 0.0) {
    fail(ErrorCode::kParseError, path + ": malformed PFM header");
  }
  in.get();  // single whitespace before the raster
  std::vector<float> raw(static_cast<size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), raw.size() * sizeof(float));
  if (!in) fail(ErrorCode::kTruncatedFile, path + ": PFM raster truncated");

  bool file_little = scale < 0.0;
  bool host_little = std::endian::native == std::endian::little;
  if (file_little != host_little) {
    for (float& v : raw) {
      uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = __builtin_bswap32(bits);
      std::memcpy(&v, &bits, 4);
    }
  }
  // PFM rows are bottom-up.
  std::vector<float> values(raw.size());
  for (int y = 0; y < height; ++y) {
    std::memcpy(values.data() + static_cast<size_t>(y) * width,
                raw.data() + static_cast<size_t>(height - 1 - y) * width,
                static_cast<size_t>(width) * sizeof(float));
  }
  return DepthMap(width, height, std::move(values));
}

void save_pfm(const DepthMap& depth, const std::string& path) {
  if (depth.empty()) {
    fail(ErrorCode::kInvalidArgument, "cannot save an empty depth map");
  }
  std::ostringstream out;
  out << "Pf\n" << depth.width() << " " << depth.height() << "\n";
  out << (std::endian::native == std::endian::little ? "-1.0" : "1.0") << "\n";
  for (int y = depth.height() - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(depth.values().data() +
                                            static_cast<size_t>(y) * depth.width()),
              static_cast<size_t>(depth.width()) * sizeof(float));
  }
  std::string blob = out.str();
  atomic_write_file(path, blob.data(), blob.size());
}

void atomic_write_file(const std::string& path, const void* data, size_t size) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) io_fail(tmp, "cannot open for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) io_fail(tmp, "write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tokenwarp
