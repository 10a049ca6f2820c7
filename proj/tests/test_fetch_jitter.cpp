#include "doctest.h"

#include <cmath>

#include "core/fetch.hpp"
#include "core/jitter.hpp"
#include "core/rng.hpp"
#include "support/test_helpers.hpp"

using namespace tokenwarp;

namespace {

// Exhaustive reference: scan all source centers, strictly-smaller distance
// wins, first (smaller row-major) index wins ties.
int argmin_center(const Vec2& coord, const PatchGrid& grid) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.cell_count(); ++i) {
    double d = (grid.center(i) - coord).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

WarpField field_with(const PatchGrid& grid, const std::vector<Vec2>& coords) {
  WarpField field(WarpDomain::kTokenGrid, PoseDirection::kTargetToSource,
                  grid.rows(), grid.cols());
  for (int i = 0; i < field.size() && i < static_cast<int>(coords.size()); ++i) {
    field.entry(i).valid = true;
    field.entry(i).coord = coords[i];
  }
  return field;
}

}  // namespace

TEST_CASE("nearest fetch on exact centers returns those cells") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  std::vector<Vec2> coords(grid.cell_count());
  for (int i = 0; i < grid.cell_count(); ++i) coords[i] = grid.center(i);
  FetchMap map = nearest_fetch(field_with(grid, coords), grid);
  for (int i = 0; i < map.size(); ++i) {
    REQUIRE(map.entry(i).valid);
    CHECK(map.entry(i).nearest_index == i);
  }
}

TEST_CASE("nearest fetch matches the worked examples") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  std::vector<Vec2> coords(grid.cell_count(), Vec2(50, 40));
  coords[1] = Vec2(48, 40);  // equidistant from centers (40,40) and (56,40)
  FetchMap map = nearest_fetch(field_with(grid, coords), grid);
  CHECK(map.entry(0).nearest_index == 19);  // row 2, col 3 of an 8-wide grid
  CHECK(map.entry(1).nearest_index == 18);  // tie resolves to the smaller index
  CHECK(map.entry(0).nearest_index == argmin_center(Vec2(50, 40), grid));
  CHECK(map.entry(1).nearest_index == argmin_center(Vec2(48, 40), grid));
}

TEST_CASE("nearest fetch equals exhaustive argmin on random fields") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  CounterRng rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> coords(grid.cell_count());
    for (auto& c : coords) {
      // Include off-image coordinates and exact half-grid tie points.
      c = Vec2(rng.uniform() * 160.0 - 16.0, rng.uniform() * 160.0 - 16.0);
      if (rng.bounded(8) == 0) c.x() = std::round(c.x() / 8.0) * 8.0;
      if (rng.bounded(8) == 0) c.y() = std::round(c.y() / 8.0) * 8.0;
    }
    FetchMap map = nearest_fetch(field_with(grid, coords), grid);
    for (int i = 0; i < map.size(); ++i) {
      CHECK(map.entry(i).nearest_index == argmin_center(coords[i], grid));
    }
  }
}

TEST_CASE("invalid cells carry no nearest index") {
  PatchGrid grid = PatchGrid::create(32, 32, 16);
  WarpField field(WarpDomain::kTokenGrid, PoseDirection::kTargetToSource, 2, 2);
  field.entry(1).valid = true;
  field.entry(1).coord = Vec2(8, 8);
  FetchMap map = nearest_fetch(field, grid);
  CHECK(!map.entry(0).valid);
  CHECK(map.entry(0).nearest_index == -1);
  CHECK(map.entry(1).valid);
  CHECK(map.entry(1).nearest_index == 0);
}

TEST_CASE("adaptive crops use the rounded half-size window") {
  Image img = twtest::checkerboard(128, 128, 8);
  Patch p = crop_patch(img, Vec2(50, 40), 16);
  // Window columns [42,58), rows [32,48).
  for (int dy = 0; dy < 16; ++dy) {
    for (int dx = 0; dx < 16; ++dx) {
      Rgb expected = img.pixel(42 + dx, 32 + dy);
      size_t i = (static_cast<size_t>(dy) * 16 + dx) * 3;
      CHECK(p.rgb[i] == expected[0]);
    }
  }
}

TEST_CASE("adaptive crops at the border replicate edge pixels") {
  Image img = twtest::checkerboard(64, 64, 8);
  // Oracle: pad the image by 16 replicated pixels, then crop normally.
  int pad = 16;
  Image padded(64 + 2 * pad, 64 + 2 * pad);
  for (int y = 0; y < padded.height(); ++y) {
    for (int x = 0; x < padded.width(); ++x) {
      int sx = std::clamp(x - pad, 0, 63);
      int sy = std::clamp(y - pad, 0, 63);
      padded.set_pixel(x, y, img.pixel(sx, sy));
    }
  }
  Patch got = crop_patch(img, Vec2(4, 4), 16);
  Patch expected = crop_patch(padded, Vec2(4 + pad, 4 + pad), 16);
  CHECK(got.rgb == expected.rgb);
}

TEST_CASE("adaptive fetch at grid centers equals fixed patchification") {
  Image img = twtest::checkerboard(128, 128, 16);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  std::vector<Vec2> coords(grid.cell_count());
  for (int i = 0; i < grid.cell_count(); ++i) coords[i] = grid.center(i);
  AdaptiveFetchResult result = adaptive_fetch(field_with(grid, coords), img, 16);
  std::vector<Patch> fixed = extract_fixed_patches(img, grid);
  for (int i = 0; i < grid.cell_count(); ++i) {
    REQUIRE(result.patches[i].has_value());
    CHECK(result.patches[i]->rgb == fixed[i].rgb);
  }
  CHECK(result.map.mode() == FetchMode::kAdaptive);
}

TEST_CASE("fixed patches tile the image exactly") {
  Image img = twtest::checkerboard(128, 128, 16);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  std::vector<Patch> patches = extract_fixed_patches(img, grid);
  REQUIRE(patches.size() == 64);
  // Patch 0 covers rows [0,16) x cols [0,16).
  CHECK(patches[0].rgb[0] == img.pixel(0, 0)[0]);

  std::vector<std::optional<Patch>> boxed(patches.begin(), patches.end());
  Image rebuilt = assemble_patches(boxed, grid);
  CHECK(rebuilt == img);
}

TEST_CASE("a single-cell grid returns the whole image") {
  Image img = twtest::checkerboard(16, 16, 4);
  PatchGrid grid = PatchGrid::create(16, 16, 16);
  std::vector<Patch> patches = extract_fixed_patches(img, grid);
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].rgb == img.data());
}

TEST_CASE("zero displacement yields the zero field") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  JitterField field = gen_jitter_field(grid, 0.0, 9, 77);
  for (int i = 0; i < field.size(); ++i) {
    CHECK(field.displacement(i).x() == 0.0);
    CHECK(field.displacement(i).y() == 0.0);
  }
}

TEST_CASE("the max cell magnitude equals the requested displacement") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  for (double s : {1.0, 5.0, 10.0, 20.0}) {
    for (uint64_t seed : {1ull, 99ull, 123456ull}) {
      JitterField field = gen_jitter_field(grid, s, 9, seed);
      double max_mag = 0.0;
      for (int i = 0; i < field.size(); ++i) {
        double mag = field.displacement(i).norm();
        CHECK(mag <= s + 1e-6);
        CHECK(mag > 0.0);  // smoothed gaussians are never exactly zero
        max_mag = std::max(max_mag, mag);
      }
      CHECK(std::abs(max_mag - s) < 1e-6);
    }
  }
}

TEST_CASE("a constant raw field passes through smoothing unchanged") {
  PatchGrid grid = PatchGrid::create(64, 64, 16);
  std::vector<Vec2> raw(grid.cell_count(), Vec2(3.0, 4.0));  // magnitude 5
  JitterField field = jitter_pipeline(grid, raw, 10.0, 9);
  for (int i = 0; i < field.size(); ++i) {
    CHECK(field.displacement(i).x() == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(field.displacement(i).y() == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(field.displacement(i).norm() == doctest::Approx(10.0).epsilon(1e-12));
  }
}

TEST_CASE("jitter generation is bitwise deterministic across thread counts") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  JitterField a = gen_jitter_field(grid, 12.5, 9, 2024, 1);
  JitterField b = gen_jitter_field(grid, 12.5, 9, 2024, 4);
  JitterField c = gen_jitter_field(grid, 12.5, 9, 2024, 3);
  for (int i = 0; i < a.size(); ++i) {
    CHECK(a.displacement(i).x() == b.displacement(i).x());
    CHECK(a.displacement(i).y() == b.displacement(i).y());
    CHECK(a.displacement(i).x() == c.displacement(i).x());
    CHECK(a.displacement(i).y() == c.displacement(i).y());
  }
}

TEST_CASE("different seeds give different fields") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  JitterField a = gen_jitter_field(grid, 5.0, 9, 1);
  JitterField b = gen_jitter_field(grid, 5.0, 9, 2);
  bool any_diff = false;
  for (int i = 0; i < a.size(); ++i) {
    if (a.displacement(i).x() != b.displacement(i).x() ||
        a.displacement(i).y() != b.displacement(i).y()) {
      any_diff = true;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("negative displacement scale is rejected") {
  PatchGrid grid = PatchGrid::create(32, 32, 16);
  CHECK_THROWS_AS(gen_jitter_field(grid, -1.0, 9, 0), Error);
}

TEST_CASE("zero-field token jitter reproduces fixed patches") {
  Image img = twtest::checkerboard(128, 128, 16);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  JitterField zero = gen_jitter_field(grid, 0.0, 9, 5);
  std::vector<Patch> jittered =
      apply_jitter(grid, zero, img, 16, JitterMode::kToken);
  std::vector<Patch> fixed = extract_fixed_patches(img, grid);
  for (int i = 0; i < grid.cell_count(); ++i) {
    CHECK(jittered[i].rgb == fixed[i].rgb);
  }
}

TEST_CASE("a constant one-cell shift fetches the right-hand neighbor") {
  Image img = twtest::checkerboard(128, 128, 16);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  JitterField field(grid.rows(), grid.cols(), 16.0, 9, 0);
  for (int i = 0; i < field.size(); ++i) field.displacement(i) = Vec2(16, 0);
  std::vector<Patch> jittered =
      apply_jitter(grid, field, img, 16, JitterMode::kToken);
  std::vector<Patch> fixed = extract_fixed_patches(img, grid);
  for (int r = 0; r < grid.rows(); ++r) {
    for (int k = 0; k + 1 < grid.cols(); ++k) {
      CHECK(jittered[grid.index(r, k)].rgb == fixed[grid.index(r, k + 1)].rgb);
    }
  }
}

TEST_CASE("pixel-baseline mode with zero scale stays bit-identical") {
  Image img = twtest::checkerboard(128, 128, 16);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  JitterField zero = gen_jitter_field(grid, 0.0, 9, 5);
  std::vector<Patch> jittered =
      apply_jitter(grid, zero, img, 16, JitterMode::kPixelBaseline, 17);
  std::vector<Patch> fixed = extract_fixed_patches(img, grid);
  for (int i = 0; i < grid.cell_count(); ++i) {
    CHECK(jittered[i].rgb == fixed[i].rgb);
  }
}

TEST_CASE("pixel-baseline noise perturbs pixels within the 10% bound") {
  Image img = twtest::checkerboard(128, 128, 4);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  JitterField field = gen_jitter_field(grid, 10.0, 9, 3);
  std::vector<Patch> token = apply_jitter(grid, field, img, 16, JitterMode::kToken);
  std::vector<Patch> noisy =
      apply_jitter(grid, field, img, 16, JitterMode::kPixelBaseline, 17);
  bool any_diff = false;
  for (int i = 0; i < grid.cell_count(); ++i) {
    if (token[i].rgb != noisy[i].rgb) any_diff = true;
  }
  CHECK(any_diff);
}
