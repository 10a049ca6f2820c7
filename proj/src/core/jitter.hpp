#pragma once

#include <cstdint>
#include <vector>

#include "core/fetch.hpp"
#include "core/geometry.hpp"
#include "core/image.hpp"

namespace tokenwarp {

// Smoothed, magnitude-normalized per-cell displacement field used to perturb
// patch fetch positions.
class JitterField {
 public:
  JitterField(int rows, int cols, double max_displacement, int neighborhood,
              uint64_t seed)
      : rows_(rows), cols_(cols), max_displacement_(max_displacement),
        neighborhood_(neighborhood), seed_(seed),
        displacement_(static_cast<size_t>(rows) * cols, Vec2::Zero()) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  double max_displacement() const { return max_displacement_; }
  int neighborhood() const { return neighborhood_; }
  uint64_t seed() const { return seed_; }

  const Vec2& displacement(int index) const { return displacement_[index]; }
  Vec2& displacement(int index) { return displacement_[index]; }

 private:
  int rows_;
  int cols_;
  double max_displacement_;
  int neighborhood_;
  uint64_t seed_;
  std::vector<Vec2> displacement_;
};

// Gaussian raw samples per cell -> mean filter over the neighborhood (border
// cells average their in-grid neighbors only) -> divide by the global max
// magnitude -> scale by max_displacement. max_displacement = 0 yields the
// zero field. Bitwise deterministic in (seed, grid, parameters) regardless
// of thread count. neighborhood must be an odd square (1, 9, 25, ...).
JitterField gen_jitter_field(const PatchGrid& grid, double max_displacement,
                             int neighborhood, uint64_t seed, int threads = 0);

// The smoothing/normalize/scale pipeline on caller-supplied raw samples.
JitterField jitter_pipeline(const PatchGrid& grid, std::vector<Vec2> raw,
                            double max_displacement, int neighborhood,
                            uint64_t seed = 0);

enum class JitterMode {
  kToken,          // crop at the displaced center
  kPixelBaseline,  // displaced crop plus per-pixel offsets of <= 10% of the
                   // max displacement, bilinearly resampled
};

std::vector<Patch> apply_jitter(const PatchGrid& grid, const JitterField& field,
                                const Image& image, int patch_size,
                                JitterMode mode, uint64_t pixel_noise_seed = 0);

}  // namespace tokenwarp
