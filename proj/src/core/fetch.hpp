#pragma once

#include <optional>
#include <vector>

#include "core/geometry.hpp"
#include "core/image.hpp"
#include "core/warp.hpp"

namespace tokenwarp {

// Values are the on-disk mode byte of the fetch-map format.
enum class FetchMode : uint8_t {
  kNearest = 0,
  kAdaptive = 1,
  kForwardPositions = 2,
};

// Coordinates are kept in the serialized precision (f32) so that a fetch map
// survives a write/read round trip bit-exactly.
struct FetchEntry {
  bool valid = false;
  float src_x = 0.f;
  float src_y = 0.f;
  int32_t nearest_index = -1;

  bool operator==(const FetchEntry& other) const = default;
};

// Per-target-cell fetch plan; the artifact's contract with token consumers.
// For kForwardPositions the grid is the source grid and coordinates are the
// forward-warped target positions.
class FetchMap {
 public:
  FetchMap(const PatchGrid& grid, FetchMode mode)
      : grid_(grid), mode_(mode), entries_(grid.cell_count()) {}

  const PatchGrid& grid() const { return grid_; }
  FetchMode mode() const { return mode_; }
  int size() const { return static_cast<int>(entries_.size()); }

  const FetchEntry& entry(int index) const { return entries_[index]; }
  FetchEntry& entry(int index) { return entries_[index]; }
  const std::vector<FetchEntry>& entries() const { return entries_; }

 private:
  PatchGrid grid_;
  FetchMode mode_;
  std::vector<FetchEntry> entries_;
};

struct Patch {
  int size = 0;
  Vec2 center = Vec2::Zero();
  std::vector<uint8_t> rgb;  // size*size*3

  bool operator==(const Patch& other) const = default;
};

// l x l crop whose window starts at round(center - l/2) on each axis;
// out-of-image rows/columns replicate the border.
Patch crop_patch(const Image& image, const Vec2& center, int patch_size);

// Assigns each valid cell the source grid cell with the Euclidean-nearest
// center; exact ties go to the smaller row-major index. Equals exhaustive
// argmin over all source centers.
FetchMap nearest_fetch(const WarpField& field, const PatchGrid& source_grid);

struct AdaptiveFetchResult {
  FetchMap map;
  std::vector<std::optional<Patch>> patches;  // aligned with cells
};

// Re-patchifies the source image at the warped coordinates.
AdaptiveFetchResult adaptive_fetch(const WarpField& field, const Image& source,
                                   int patch_size);

// Row-major fixed-grid patchification; concatenating the result tiles the
// image exactly.
std::vector<Patch> extract_fixed_patches(const Image& image,
                                         const PatchGrid& grid);

// Wraps a forward warp field as a positions-only fetch map.
FetchMap forward_positions_map(const WarpField& field,
                               const PatchGrid& source_grid);

// Pastes per-cell patches back onto the grid layout; cells without a patch
// take the fill color. Patch k lands on cell k.
Image assemble_patches(const std::vector<std::optional<Patch>>& patches,
                       const PatchGrid& grid, Rgb fill = {0, 0, 0});

}  // namespace tokenwarp
