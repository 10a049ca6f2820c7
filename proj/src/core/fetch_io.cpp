#include "core/fetch_io.hpp"

#include <cstring>
#include <fstream>

#include "core/io_png.hpp"

namespace tokenwarp {

namespace {

constexpr char kMagic[4] = {'T', 'W', 'F', 'M'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

void put_i32(std::string& out, int32_t v) {
  put_u32(out, static_cast<uint32_t>(v));
}

class Cursor {
 public:
  Cursor(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}

  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(data_[pos_++]);
  }

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<uint8_t>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  float f32() {
    uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  int32_t i32() { return static_cast<int32_t>(u32()); }

 private:
  void need(size_t n) {
    if (pos_ + n > data_.size()) {
      fail(ErrorCode::kTruncatedFile, path_ + ": fetch map truncated");
    }
  }

  const std::string& data_;
  const std::string& path_;
  size_t pos_ = 0;
};

}  // namespace

const char* fetch_mode_name(FetchMode mode) {
  switch (mode) {
    case FetchMode::kNearest: return "nearest";
    case FetchMode::kAdaptive: return "adaptive";
    case FetchMode::kForwardPositions: return "forward-positions";
  }
  return "?";
}

void write_fetch_map(const FetchMap& map, const std::string& path,
                     bool emit_json) {
  const PatchGrid& grid = map.grid();
  std::string blob;
  blob.reserve(29 + static_cast<size_t>(map.size()) * 13);
  blob.append(kMagic, 4);
  put_u32(blob, kVersion);
  put_u32(blob, static_cast<uint32_t>(grid.rows()));
  put_u32(blob, static_cast<uint32_t>(grid.cols()));
  put_u32(blob, static_cast<uint32_t>(grid.patch_size()));
  put_u32(blob, static_cast<uint32_t>(grid.image_height()));
  put_u32(blob, static_cast<uint32_t>(grid.image_width()));
  blob.push_back(static_cast<char>(map.mode()));
  for (int i = 0; i < map.size(); ++i) {
    const FetchEntry& e = map.entry(i);
    blob.push_back(e.valid ? 1 : 0);
    put_f32(blob, e.valid ? e.src_x : 0.f);
    put_f32(blob, e.valid ? e.src_y : 0.f);
    put_i32(blob, e.valid ? e.nearest_index : -1);
  }
  atomic_write_file(path, blob.data(), blob.size());

  if (emit_json) {
    std::string json_text = fetch_map_to_json(map).dump(2);
    json_text.push_back('\n');
    atomic_write_file(path + ".json", json_text.data(), json_text.size());
  }
}

FetchMap read_fetch_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, path + ": cannot open for reading");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0) {
    fail(ErrorCode::kBadMagic, path + ": not a TWFM fetch map");
  }
  Cursor cur(data, path);
  cur.u32();  // magic, already checked
  uint32_t version = cur.u32();
  if (version != kVersion) {
    fail(ErrorCode::kUnsupportedVersion,
         path + ": unsupported fetch map version " + std::to_string(version));
  }
  uint32_t rows = cur.u32();
  uint32_t cols = cur.u32();
  uint32_t patch_size = cur.u32();
  uint32_t image_h = cur.u32();
  uint32_t image_w = cur.u32();
  uint8_t mode = cur.u8();
  if (mode > 2) {
    fail(ErrorCode::kParseError, path + ": unknown fetch mode byte");
  }
  if (rows == 0 || cols == 0 || patch_size == 0 ||
      image_h != rows * patch_size || image_w != cols * patch_size) {
    fail(ErrorCode::kParseError, path + ": inconsistent fetch map header");
  }

  PatchGrid grid = PatchGrid::create(static_cast<int>(image_h),
                                     static_cast<int>(image_w),
                                     static_cast<int>(patch_size));
  FetchMap map(grid, static_cast<FetchMode>(mode));
  for (int i = 0; i < map.size(); ++i) {
    FetchEntry& e = map.entry(i);
    e.valid = cur.u8() != 0;
    e.src_x = cur.f32();
    e.src_y = cur.f32();
    e.nearest_index = cur.i32();
  }
  return map;
}

nlohmann::json fetch_map_to_json(const FetchMap& map) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["grid_rows"] = map.grid().rows();
  j["grid_cols"] = map.grid().cols();
  j["patch_size"] = map.grid().patch_size();
  j["image_h"] = map.grid().image_height();
  j["image_w"] = map.grid().image_width();
  j["mode"] = fetch_mode_name(map.mode());
  nlohmann::json entries = nlohmann::json::array();
  for (int i = 0; i < map.size(); ++i) {
    const FetchEntry& e = map.entry(i);
    nlohmann::json item;
    item["valid"] = e.valid;
    if (e.valid) {
      item["src_x"] = e.src_x;
      item["src_y"] = e.src_y;
      if (e.nearest_index >= 0) item["nearest_index"] = e.nearest_index;
    }
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j;
}

}  // namespace tokenwarp
