#include "doctest.h"

#include <Eigen/Geometry>

#include "core/mesh.hpp"
#include "core/rng.hpp"
#include "core/synthetic.hpp"
#include "core/warp.hpp"
#include "support/test_helpers.hpp"

using namespace tokenwarp;
using twtest::camera_at;
using twtest::k0;

namespace {

ProxyMesh plane_mesh(float z) {
  return build_mesh(twtest::constant_depth(128, 128, z), k0());
}

RelativePosePair rel_to(const CameraPose& target) {
  return RelativePosePair::between(CameraPose::identity(), target);
}

}  // namespace

TEST_CASE("backward warping under identity maps every center to itself") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  WarpField field = backward_warp_grid(grid, plane_mesh(2.f),
                                       RelativePosePair::identity(), k0());
  for (int i = 0; i < field.size(); ++i) {
    REQUIRE(field.entry(i).valid);
    CHECK((field.entry(i).coord - grid.center(i)).norm() < 1e-3);
  }
}

TEST_CASE("backward warping reproduces the analytic 10px shift") {
  // Camera moves +0.2 m along x in front of a z=2 plane: fx*t/z = 10 px.
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  WarpField field = backward_warp_grid(grid, plane_mesh(2.f),
                                       rel_to(camera_at(Vec3(0.2, 0, 0))), k0());
  Vec2 probe(40, 40);
  std::vector<Vec2> coords{probe};
  auto mapped = backward_warp_points(coords, plane_mesh(2.f),
                                     rel_to(camera_at(Vec3(0.2, 0, 0))), k0());
  REQUIRE(mapped[0].valid);
  CHECK(mapped[0].coord.x() == doctest::Approx(50.0).epsilon(1e-9));
  CHECK(mapped[0].coord.y() == doctest::Approx(40.0).epsilon(1e-9));

  // Grid cells shift identically while they stay over the mesh.
  for (int i = 0; i < field.size(); ++i) {
    Vec2 g = grid.center(i);
    if (g.x() + 10.0 <= 127.0) {
      REQUIRE(field.entry(i).valid);
      CHECK(std::abs(field.entry(i).coord.x() - (g.x() + 10.0)) < 1e-6);
      CHECK(std::abs(field.entry(i).coord.y() - g.y()) < 1e-6);
    }
  }
}

TEST_CASE("a target looking away from the frustum yields no valid cells") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  Mat3 about_face = Eigen::AngleAxisd(M_PI, Vec3::UnitY()).toRotationMatrix();
  CameraPose target(about_face, Vec3::Zero());
  WarpField field = backward_warp_grid(grid, plane_mesh(2.f), rel_to(target), k0());
  for (int i = 0; i < field.size(); ++i) CHECK(!field.entry(i).valid);
}

TEST_CASE("forward warping under identity is exact") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  WarpField field = forward_warp_grid(grid, twtest::constant_depth(128, 128, 2.f),
                                      RelativePosePair::identity(), k0());
  for (int i = 0; i < field.size(); ++i) {
    REQUIRE(field.entry(i).valid);
    CHECK(field.entry(i).coord.x() == grid.center(i).x());
    CHECK(field.entry(i).coord.y() == grid.center(i).y());
  }
}

TEST_CASE("forward warping matches the hand-projected example") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  WarpField field = forward_warp_grid(grid, twtest::constant_depth(128, 128, 2.f),
                                      rel_to(camera_at(Vec3(0.2, 0, 0))), k0());
  // Cell whose center is (40, 40): row 2, col 2.
  int idx = grid.index(2, 2);
  REQUIRE(grid.center(idx).x() == 40.0);
  REQUIRE(grid.center(idx).y() == 40.0);
  REQUIRE(field.entry(idx).valid);
  CHECK(field.entry(idx).coord.x() == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(field.entry(idx).coord.y() == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("forward warping marks invalid-depth cells invalid") {
  DepthMap depth = twtest::constant_depth(128, 128, 2.f);
  // Invalidate the pixel the (0,0) cell center reads (nearest pixel of (8,8)).
  depth.set_value(8, 8, 0.f);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  WarpField field = forward_warp_grid(grid, depth, RelativePosePair::identity(),
                                      k0());
  CHECK(!field.entry(0).valid);
  CHECK(field.entry(1).valid);
}

TEST_CASE("forward warping marks behind-camera cells invalid") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  // Target 3 m ahead: the z=2 plane ends up behind it.
  WarpField field = forward_warp_grid(grid, twtest::constant_depth(128, 128, 2.f),
                                      rel_to(camera_at(Vec3(0, 0, 3))), k0());
  for (int i = 0; i < field.size(); ++i) CHECK(!field.entry(i).valid);
}

TEST_CASE("pixel backward warping under identity reproduces the source") {
  Image source = twtest::checkerboard(128, 128, 16);
  WarpedImage out = pixel_backward_warp_image(source, plane_mesh(2.f),
                                              RelativePosePair::identity(), k0());
  CHECK(out.image == source);
  for (uint8_t v : out.valid) CHECK(v == 1);
}

TEST_CASE("pixel backward warping matches the shifted checkerboard") {
  Image source = twtest::checkerboard(128, 128, 16);
  WarpedImage out = pixel_backward_warp_image(source, plane_mesh(2.f),
                                              rel_to(camera_at(Vec3(0.2, 0, 0))),
                                              k0());
  int mismatches = 0;
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (x + 10 < 128) {
        // In the covered region the warp reads source pixel (x+10, y).
        REQUIRE(out.pixel_valid(x, y));
        Rgb expected = source.pixel(x + 10, y);
        Rgb got = out.image.pixel(x, y);
        for (int c = 0; c < 3; ++c) {
          if (std::abs(int(expected[c]) - int(got[c])) > 1) ++mismatches;
        }
      } else {
        // Disocclusion band on the revealed side.
        CHECK(!out.pixel_valid(x, y));
      }
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("pixel backward warping of disjoint views is fully invalid") {
  Image source = twtest::checkerboard(128, 128, 16);
  Mat3 about_face = Eigen::AngleAxisd(M_PI, Vec3::UnitY()).toRotationMatrix();
  WarpedImage out = pixel_backward_warp_image(
      source, plane_mesh(2.f), rel_to(CameraPose(about_face, Vec3::Zero())),
      k0());
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      CHECK(!out.pixel_valid(x, y));
      CHECK(out.image.pixel(x, y) == Rgb{0, 0, 0});
    }
  }
}

TEST_CASE("pixel forward warping under identity is exact with no holes") {
  Image source = twtest::checkerboard(128, 128, 16);
  WarpedImage out = pixel_forward_warp_image(source,
                                             twtest::constant_depth(128, 128, 2.f),
                                             RelativePosePair::identity(), k0());
  CHECK(out.image == source);
  for (uint8_t v : out.valid) CHECK(v == 1);
}

TEST_CASE("pixel forward warping shifts content and leaves a hole band") {
  Image source = twtest::checkerboard(128, 128, 16);
  WarpedImage out = pixel_forward_warp_image(source,
                                             twtest::constant_depth(128, 128, 2.f),
                                             rel_to(camera_at(Vec3(0.2, 0, 0))),
                                             k0());
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      if (x + 10 < 128) {
        REQUIRE(out.pixel_valid(x, y));
        CHECK(out.image.pixel(x, y) == source.pixel(x + 10, y));
      } else {
        CHECK(!out.pixel_valid(x, y));
      }
    }
  }
}

TEST_CASE("pixel forward warping resolves collisions with the z-buffer") {
  // Left half far (white) and right half near (black); translation makes the
  // near content slide over the far content.
  Image source(128, 128);
  DepthMap depth(128, 128);
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) {
      bool near = x >= 64;
      source.set_pixel(x, y, near ? Rgb{0, 0, 0} : Rgb{255, 255, 255});
      depth.set_value(x, y, near ? 1.f : 4.f);
    }
  }
  WarpedImage out = pixel_forward_warp_image(source, depth,
                                             rel_to(camera_at(Vec3(0.2, 0, 0))),
                                             k0());
  // Far pixels shift by 5, near pixels by 20. Target columns [44, 59) receive
  // both; the near (black) surface must win.
  for (int y = 0; y < 128; ++y) {
    for (int x = 45; x < 58; ++x) {
      REQUIRE(out.pixel_valid(x, y));
      CHECK(out.image.pixel(x, y) == Rgb{0, 0, 0});
    }
  }
}

TEST_CASE("backward warping agrees with the plane homography over random poses") {
  CheckerParams texture;
  CounterRng rng(4242);
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  for (int trial = 0; trial < 8; ++trial) {
    RigidTransform pose = twtest::random_rigid(rng, 15.0 * M_PI / 180.0, 0.5);
    SyntheticScene scene = gen_plane_scene(k0(), 2.0, texture, pose);
    ProxyMesh mesh = build_mesh(scene.depth, scene.intrinsics);
    RelativePosePair rel =
        RelativePosePair::between(scene.source_pose, scene.target_pose);
    WarpField field = backward_warp_grid(grid, mesh, rel, scene.intrinsics);
    int checked = 0;
    for (int i = 0; i < field.size(); ++i) {
      if (!field.entry(i).valid) continue;
      auto expected = analytic_backward_oracle(scene, grid.center(i));
      REQUIRE(expected.has_value());
      CHECK((field.entry(i).coord - *expected).norm() < 1e-2);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("forward then backward at the rounded coordinate returns home") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  DepthMap depth = twtest::constant_depth(128, 128, 2.f);
  ProxyMesh mesh = plane_mesh(2.f);
  // Translations chosen to land on integer pixel shifts.
  std::vector<Vec3> centers{{0.2, 0, 0}, {0, 0.2, 0}, {0.32, -0.16, 0}};
  for (const Vec3& c : centers) {
    RelativePosePair rel = rel_to(camera_at(c));
    WarpField forward = forward_warp_grid(grid, depth, rel, k0());
    std::vector<Vec2> rounded;
    std::vector<int> cells;
    for (int i = 0; i < forward.size(); ++i) {
      if (!forward.entry(i).valid) continue;
      rounded.emplace_back(std::round(forward.entry(i).coord.x()),
                           std::round(forward.entry(i).coord.y()));
      cells.push_back(i);
    }
    auto back = backward_warp_points(rounded, mesh, rel, k0());
    int ok = 0;
    int valid = 0;
    for (size_t j = 0; j < back.size(); ++j) {
      if (!back[j].valid) continue;
      ++valid;
      if ((back[j].coord - grid.center(cells[j])).norm() < 0.5) ++ok;
    }
    REQUIRE(valid > 0);
    CHECK(ok == valid);
  }
}

TEST_CASE("stretching the baseline never revalidates a frustum-miss cell") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  ProxyMesh mesh = plane_mesh(2.f);
  std::vector<bool> previous;
  for (double tx : {0.1, 0.2, 0.3, 0.4}) {
    WarpField field = backward_warp_grid(grid, mesh,
                                         rel_to(camera_at(Vec3(tx, 0, 0))), k0());
    std::vector<bool> current(field.size());
    for (int i = 0; i < field.size(); ++i) current[i] = field.entry(i).valid;
    if (!previous.empty()) {
      for (int i = 0; i < field.size(); ++i) {
        if (current[i]) CHECK(previous[i]);  // valid now => valid before
      }
    }
    previous = std::move(current);
  }
}

TEST_CASE("warp results do not depend on the thread count") {
  PatchGrid grid = PatchGrid::create(128, 128, 16);
  ProxyMesh mesh = plane_mesh(2.f);
  RelativePosePair rel = rel_to(camera_at(Vec3(0.17, -0.05, 0.02)));
  WarpField serial = backward_warp_grid(grid, mesh, rel, k0(), 1);
  WarpField threaded = backward_warp_grid(grid, mesh, rel, k0(), 4);
  for (int i = 0; i < serial.size(); ++i) {
    CHECK(serial.entry(i).valid == threaded.entry(i).valid);
    CHECK(serial.entry(i).coord.x() == threaded.entry(i).coord.x());
    CHECK(serial.entry(i).coord.y() == threaded.entry(i).coord.y());
  }
}
