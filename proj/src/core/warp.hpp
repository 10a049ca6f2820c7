#pragma once

#include <optional>
#include <span>
#include <vector>

#include "core/bvh.hpp"
#include "core/geometry.hpp"
#include "core/image.hpp"
#include "core/mesh.hpp"

namespace tokenwarp {

enum class WarpDomain { kTokenGrid, kPixel };

struct WarpEntry {
  bool valid = false;
  Vec2 coord = Vec2::Zero();  // mapped coordinate, continuous pixels
};

// Per-cell (token grid) or per-pixel warped coordinates. Backward fields map
// target cells to source coordinates; forward fields map source cells to
// target coordinates.
class WarpField {
 public:
  WarpField(WarpDomain domain, PoseDirection direction, int rows, int cols)
      : domain_(domain), direction_(direction), rows_(rows), cols_(cols),
        entries_(static_cast<size_t>(rows) * cols) {}

  WarpDomain domain() const { return domain_; }
  PoseDirection direction() const { return direction_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }

  const WarpEntry& entry(int index) const { return entries_[index]; }
  WarpEntry& entry(int index) { return entries_[index]; }
  const std::vector<WarpEntry>& entries() const { return entries_; }

 private:
  WarpDomain domain_;
  PoseDirection direction_;
  int rows_;
  int cols_;
  std::vector<WarpEntry> entries_;
};

// Casts the target-camera ray through each coordinate against the source
// mesh moved into the target frame, then projects hits back to the source
// image plane. Misses come back invalid.
std::vector<WarpEntry> backward_warp_points(std::span<const Vec2> target_coords,
                                            const ProxyMesh& source_mesh,
                                            const RelativePosePair& rel,
                                            const CameraIntrinsics& K,
                                            int threads = 0);

// Backward token warping over the target patch grid.
WarpField backward_warp_grid(const PatchGrid& target_grid,
                             const ProxyMesh& source_mesh,
                             const RelativePosePair& rel,
                             const CameraIntrinsics& K, int threads = 0);

// Forward token warping: unproject each source cell center at the
// nearest-pixel depth, transform, project. Cells with invalid depth or
// landing behind the target camera are invalid; coordinates are continuous
// and unclamped.
WarpField forward_warp_grid(const PatchGrid& source_grid, const DepthMap& depth,
                            const RelativePosePair& rel,
                            const CameraIntrinsics& K);

struct WarpedImage {
  Image image;
  std::vector<uint8_t> valid;  // 1 per pixel, row-major

  bool pixel_valid(int x, int y) const {
    return valid[static_cast<size_t>(y) * image.width() + x] != 0;
  }
};

struct PixelWarpOptions {
  Rgb fill = {0, 0, 0};
  int threads = 0;
};

// Backward warping at pixel resolution with bilinear color sampling.
WarpedImage pixel_backward_warp_image(const Image& source,
                                      const ProxyMesh& source_mesh,
                                      const RelativePosePair& rel,
                                      const CameraIntrinsics& K,
                                      const PixelWarpOptions& options = {});

// Forward splatting with a z-buffer: every valid source pixel lands on the
// target pixel containing its projection; smaller target-frame depth wins,
// earlier source pixel wins exact ties. Unhit pixels are holes.
WarpedImage pixel_forward_warp_image(const Image& source, const DepthMap& depth,
                                     const RelativePosePair& rel,
                                     const CameraIntrinsics& K,
                                     const PixelWarpOptions& options = {});

}  // namespace tokenwarp
