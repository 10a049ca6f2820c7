#include "core/fetch.hpp"

#include <algorithm>
#include <cmath>

namespace tokenwarp {

Patch crop_patch(const Image& image, const Vec2& center, int patch_size) {
  Patch patch;
  patch.size = patch_size;
  patch.center = center;
  patch.rgb.resize(static_cast<size_t>(patch_size) * patch_size * 3);
  int x0 = static_cast<int>(std::lround(center.x() - patch_size * 0.5));
  int y0 = static_cast<int>(std::lround(center.y() - patch_size * 0.5));
  for (int dy = 0; dy < patch_size; ++dy) {
    int sy = std::clamp(y0 + dy, 0, image.height() - 1);
    for (int dx = 0; dx < patch_size; ++dx) {
      int sx = std::clamp(x0 + dx, 0, image.width() - 1);
      Rgb p = image.pixel(sx, sy);
      size_t i = (static_cast<size_t>(dy) * patch_size + dx) * 3;
      patch.rgb[i] = p[0];
      patch.rgb[i + 1] = p[1];
      patch.rgb[i + 2] = p[2];
    }
  }
  return patch;
}

namespace {

// Index of the nearest grid center along one axis; half-way ties take the
// smaller index.
int nearest_axis_index(double coord, int patch_size, int count) {
  double q = (coord - patch_size * 0.5) / patch_size;
  int j = static_cast<int>(std::ceil(q - 0.5));
  return std::clamp(j, 0, count - 1);
}

}  // namespace

FetchMap nearest_fetch(const WarpField& field, const PatchGrid& source_grid) {
  if (field.domain() != WarpDomain::kTokenGrid ||
      field.direction() != PoseDirection::kTargetToSource) {
    fail(ErrorCode::kInvalidArgument,
         "nearest fetching needs a token-grid backward warp field");
  }
  PatchGrid target_grid = PatchGrid::create(
      field.rows() * source_grid.patch_size(),
      field.cols() * source_grid.patch_size(), source_grid.patch_size());
  FetchMap map(target_grid, FetchMode::kNearest);
  int l = source_grid.patch_size();
  for (int i = 0; i < field.size(); ++i) {
    const WarpEntry& e = field.entry(i);
    if (!e.valid) continue;
    int col = nearest_axis_index(e.coord.x(), l, source_grid.cols());
    int row = nearest_axis_index(e.coord.y(), l, source_grid.rows());
    FetchEntry& out = map.entry(i);
    out.valid = true;
    out.src_x = static_cast<float>(e.coord.x());
    out.src_y = static_cast<float>(e.coord.y());
    out.nearest_index = source_grid.index(row, col);
  }
  return map;
}

AdaptiveFetchResult adaptive_fetch(const WarpField& field, const Image& source,
                                   int patch_size) {
  if (field.domain() != WarpDomain::kTokenGrid ||
      field.direction() != PoseDirection::kTargetToSource) {
    fail(ErrorCode::kInvalidArgument,
         "adaptive fetching needs a token-grid backward warp field");
  }
  PatchGrid target_grid = PatchGrid::create(field.rows() * patch_size,
                                            field.cols() * patch_size,
                                            patch_size);
  AdaptiveFetchResult result{FetchMap(target_grid, FetchMode::kAdaptive), {}};
  result.patches.resize(field.size());
  for (int i = 0; i < field.size(); ++i) {
    const WarpEntry& e = field.entry(i);
    if (!e.valid) continue;
    FetchEntry& out = result.map.entry(i);
    out.valid = true;
    out.src_x = static_cast<float>(e.coord.x());
    out.src_y = static_cast<float>(e.coord.y());
    result.patches[i] = crop_patch(source, e.coord, patch_size);
  }
  return result;
}

std::vector<Patch> extract_fixed_patches(const Image& image,
                                         const PatchGrid& grid) {
  if (grid.image_width() != image.width() ||
      grid.image_height() != image.height()) {
    fail(ErrorCode::kDimensionMismatch, "grid does not match image dimensions");
  }
  int l = grid.patch_size();
  std::vector<Patch> patches;
  patches.reserve(grid.cell_count());
  for (int r = 0; r < grid.rows(); ++r) {
    for (int k = 0; k < grid.cols(); ++k) {
      Patch p;
      p.size = l;
      p.center = grid.center(r, k);
      p.rgb.resize(static_cast<size_t>(l) * l * 3);
      for (int dy = 0; dy < l; ++dy) {
        for (int dx = 0; dx < l; ++dx) {
          Rgb px = image.pixel(k * l + dx, r * l + dy);
          size_t i = (static_cast<size_t>(dy) * l + dx) * 3;
          p.rgb[i] = px[0];
          p.rgb[i + 1] = px[1];
          p.rgb[i + 2] = px[2];
        }
      }
      patches.push_back(std::move(p));
    }
  }
  return patches;
}

FetchMap forward_positions_map(const WarpField& field,
                               const PatchGrid& source_grid) {
  if (field.domain() != WarpDomain::kTokenGrid ||
      field.direction() != PoseDirection::kSourceToTarget) {
    fail(ErrorCode::kInvalidArgument,
         "positions map needs a token-grid forward warp field");
  }
  if (field.rows() != source_grid.rows() || field.cols() != source_grid.cols()) {
    fail(ErrorCode::kDimensionMismatch, "warp field does not match source grid");
  }
  FetchMap map(source_grid, FetchMode::kForwardPositions);
  for (int i = 0; i < field.size(); ++i) {
    const WarpEntry& e = field.entry(i);
    if (!e.valid) continue;
    map.entry(i).valid = true;
    map.entry(i).src_x = static_cast<float>(e.coord.x());
    map.entry(i).src_y = static_cast<float>(e.coord.y());
  }
  return map;
}

Image assemble_patches(const std::vector<std::optional<Patch>>& patches,
                       const PatchGrid& grid, Rgb fill) {
  if (static_cast<int>(patches.size()) != grid.cell_count()) {
    fail(ErrorCode::kDimensionMismatch, "patch count does not match grid");
  }
  int l = grid.patch_size();
  Image out(grid.image_width(), grid.image_height(), fill);
  for (int r = 0; r < grid.rows(); ++r) {
    for (int k = 0; k < grid.cols(); ++k) {
      const auto& patch = patches[grid.index(r, k)];
      if (!patch) continue;
      for (int dy = 0; dy < l; ++dy) {
        for (int dx = 0; dx < l; ++dx) {
          size_t i = (static_cast<size_t>(dy) * l + dx) * 3;
          out.set_pixel(k * l + dx, r * l + dy,
                        {patch->rgb[i], patch->rgb[i + 1], patch->rgb[i + 2]});
        }
      }
    }
  }
  return out;
}

}  // namespace tokenwarp
