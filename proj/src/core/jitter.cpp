#include "core/jitter.hpp"

#include <algorithm>
#include <cmath>

#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace tokenwarp {

namespace {

int neighborhood_radius(int neighborhood) {
  int side = static_cast<int>(std::lround(std::sqrt(double(neighborhood))));
  if (side * side != neighborhood || side % 2 == 0 || side < 1) {
    fail(ErrorCode::kInvalidArgument,
         "smoothing neighborhood must be an odd square cell count");
  }
  return side / 2;
}

}  // namespace

JitterField jitter_pipeline(const PatchGrid& grid, std::vector<Vec2> raw,
                            double max_displacement, int neighborhood,
                            uint64_t seed) {
  if (max_displacement < 0.0) {
    fail(ErrorCode::kNegativeScale, "max displacement must be >= 0");
  }
  int radius = neighborhood_radius(neighborhood);
  int rows = grid.rows();
  int cols = grid.cols();
  if (static_cast<int>(raw.size()) != rows * cols) {
    fail(ErrorCode::kDimensionMismatch, "raw field does not match grid");
  }

  JitterField field(rows, cols, max_displacement, neighborhood, seed);
  if (max_displacement == 0.0) return field;

  // Mean filter; windows shrink to the in-grid subset at the borders.
  std::vector<Vec2> smooth(raw.size(), Vec2::Zero());
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) {
      Vec2 sum = Vec2::Zero();
      int n = 0;
      for (int dr = -radius; dr <= radius; ++dr) {
        int rr = r + dr;
        if (rr < 0 || rr >= rows) continue;
        for (int dk = -radius; dk <= radius; ++dk) {
          int kk = k + dk;
          if (kk < 0 || kk >= cols) continue;
          sum += raw[static_cast<size_t>(rr) * cols + kk];
          ++n;
        }
      }
      smooth[static_cast<size_t>(r) * cols + k] = sum / n;
    }
  }

  double max_mag = 0.0;
  for (const Vec2& v : smooth) max_mag = std::max(max_mag, v.norm());
  if (max_mag == 0.0) return field;  // degenerate raw field stays zero

  double scale = max_displacement / max_mag;
  for (int i = 0; i < rows * cols; ++i) {
    field.displacement(i) = smooth[i] * scale;
  }
  return field;
}

JitterField gen_jitter_field(const PatchGrid& grid, double max_displacement,
                             int neighborhood, uint64_t seed, int threads) {
  if (max_displacement < 0.0) {
    fail(ErrorCode::kNegativeScale, "max displacement must be >= 0");
  }
  neighborhood_radius(neighborhood);  // validate early

  std::vector<Vec2> raw(grid.cell_count());
  parallel_for(grid.cell_count(), threads, [&](int i) {
    CounterRng rng(seed, static_cast<uint64_t>(i));
    auto [gx, gy] = rng.gaussian_pair();
    raw[i] = Vec2(gx, gy);
  });
  return jitter_pipeline(grid, std::move(raw), max_displacement, neighborhood,
                         seed);
}

std::vector<Patch> apply_jitter(const PatchGrid& grid, const JitterField& field,
                                const Image& image, int patch_size,
                                JitterMode mode, uint64_t pixel_noise_seed) {
  if (field.rows() != grid.rows() || field.cols() != grid.cols()) {
    fail(ErrorCode::kDimensionMismatch, "jitter field does not match grid");
  }
  if (grid.image_width() != image.width() ||
      grid.image_height() != image.height()) {
    fail(ErrorCode::kDimensionMismatch, "grid does not match image dimensions");
  }

  double noise_cap = 0.1 * field.max_displacement();
  std::vector<Patch> patches(grid.cell_count());
  for (int i = 0; i < grid.cell_count(); ++i) {
    Vec2 center = grid.center(i) + field.displacement(i);
    Patch patch = crop_patch(image, center, patch_size);
    if (mode == JitterMode::kPixelBaseline && noise_cap > 0.0) {
      int x0 = static_cast<int>(std::lround(center.x() - patch_size * 0.5));
      int y0 = static_cast<int>(std::lround(center.y() - patch_size * 0.5));
      for (int dy = 0; dy < patch_size; ++dy) {
        for (int dx = 0; dx < patch_size; ++dx) {
          CounterRng rng(pixel_noise_seed,
                         mix_keys(static_cast<uint64_t>(i),
                                  static_cast<uint64_t>(dy) * patch_size + dx));
          double angle = 2.0 * M_PI * rng.uniform();
          double radius = noise_cap * rng.uniform();
          double sx = x0 + dx + 0.5 + radius * std::cos(angle);
          double sy = y0 + dy + 0.5 + radius * std::sin(angle);
          auto rgb = image.bilinear(sx, sy);
          size_t slot = (static_cast<size_t>(dy) * patch_size + dx) * 3;
          patch.rgb[slot] =
              static_cast<uint8_t>(std::lround(std::clamp(rgb[0], 0.0, 255.0)));
          patch.rgb[slot + 1] =
              static_cast<uint8_t>(std::lround(std::clamp(rgb[1], 0.0, 255.0)));
          patch.rgb[slot + 2] =
              static_cast<uint8_t>(std::lround(std::clamp(rgb[2], 0.0, 255.0)));
        }
      }
    }
    patches[i] = std::move(patch);
  }
  return patches;
}

}  // namespace tokenwarp
