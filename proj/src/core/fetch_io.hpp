#pragma once

#include <string>

#include "core/fetch.hpp"
#include "json.hpp"

namespace tokenwarp {

// Binary fetch-map container, little-endian:
//   "TWFM" | u32 version=1 | u32 grid_rows | u32 grid_cols | u32 patch_size
//   | u32 image_h | u32 image_w | u8 mode
// followed by rows*cols records of
//   u8 valid | f32 src_x | f32 src_y | i32 nearest_index (-1 when absent).
// Writes are atomic (temp file + rename). An optional JSON mirror lands at
// path + ".json".
void write_fetch_map(const FetchMap& map, const std::string& path,
                     bool emit_json = false);

// Throws BadMagic / UnsupportedVersion / TruncatedFile.
FetchMap read_fetch_map(const std::string& path);

nlohmann::json fetch_map_to_json(const FetchMap& map);

const char* fetch_mode_name(FetchMode mode);

}  // namespace tokenwarp
