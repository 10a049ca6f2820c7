#include "doctest.h"

#include <set>

#include "core/questions.hpp"
#include "core/rng.hpp"
#include "core/synthetic.hpp"
#include "core/viewbench.hpp"
#include "support/test_helpers.hpp"

using namespace tokenwarp;
using twtest::camera_at;
using twtest::k0;

TEST_CASE("visible_set applies the depth test with tolerance") {
  CameraIntrinsics K = k0();
  // One point 2 m straight ahead of the (identity-pose) camera.
  ScenePoints points{Vec3(0, 0, 2)};

  VisibleSet seen = visible_set(points, CameraPose::identity(), K,
                                twtest::constant_depth(128, 128, 2.f), 0.02);
  CHECK(seen == VisibleSet{0});

  // Occluded: stored depth says the surface is at 1 m.
  seen = visible_set(points, CameraPose::identity(), K,
                     twtest::constant_depth(128, 128, 1.f), 0.02);
  CHECK(seen.empty());

  // Behind the camera.
  seen = visible_set({Vec3(0, 0, -2)}, CameraPose::identity(), K,
                     twtest::constant_depth(128, 128, 2.f), 0.02);
  CHECK(seen.empty());
}

TEST_CASE("visible_set excludes out-of-image and invalid-depth points") {
  CameraIntrinsics K = k0();
  // Projects to u = 100*10/2 + 64 = 564: outside.
  CHECK(visible_set({Vec3(10, 0, 2)}, CameraPose::identity(), K,
                    twtest::constant_depth(128, 128, 4.f), 0.02)
            .empty());

  DepthMap holey(128, 128, 4.f);
  holey.set_value(64, 64, 0.f);
  CHECK(visible_set({Vec3(0, 0, 2)}, CameraPose::identity(), K, holey, 0.02)
            .empty());
}

TEST_CASE("strict tolerance reproduces the paper rule") {
  CameraIntrinsics K = k0();
  // z equals the stored depth exactly: excluded under the strict rule.
  CHECK(visible_set({Vec3(0, 0, 2)}, CameraPose::identity(), K,
                    twtest::constant_depth(128, 128, 2.f), 0.0)
            .empty());
}

TEST_CASE("overlap ratio follows set arithmetic") {
  CHECK(overlap_ratio({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(overlap_ratio({1, 2}, {3, 4}) == 0.0);
  CHECK(overlap_ratio({}, {}) == 0.0);
  CHECK(overlap_ratio({1, 2, 3}, {2, 3, 4}) == doctest::Approx(0.5));
  // Symmetry.
  CHECK(overlap_ratio({1, 5, 9}, {5, 9, 11}) ==
        overlap_ratio({5, 9, 11}, {1, 5, 9}));
}

TEST_CASE("overlap bins use half-open boundaries") {
  CHECK(!classify_overlap(0.01).has_value());
  CHECK(classify_overlap(0.05) == OverlapBin::k5to15);
  CHECK(classify_overlap(0.10) == OverlapBin::k5to15);
  CHECK(classify_overlap(0.15) == OverlapBin::k15to25);  // boundary goes up
  CHECK(classify_overlap(0.20) == OverlapBin::k15to25);
  CHECK(classify_overlap(0.25) == OverlapBin::k25to35);
  CHECK(classify_overlap(0.30) == OverlapBin::k25to35);
  CHECK(!classify_overlap(0.35).has_value());
  CHECK(!classify_overlap(0.40).has_value());
}

TEST_CASE("pair sampling keeps one candidate per bin when forced") {
  std::vector<ViewPairRecord> records{
      {"a", "b", 0.01}, {"c", "d", 0.10}, {"e", "f", 0.20},
      {"g", "h", 0.30}, {"i", "j", 0.40},
  };
  auto sampled = bin_and_sample_pairs(records, 1, 7);
  REQUIRE(sampled.size() == 3);
  CHECK(sampled[0].overlap == 0.10);
  CHECK(sampled[1].overlap == 0.20);
  CHECK(sampled[2].overlap == 0.30);
}

TEST_CASE("pair sampling is deterministic and a subset of its input") {
  CounterRng rng(31);
  std::vector<ViewPairRecord> records;
  for (int i = 0; i < 200; ++i) {
    records.push_back({"f" + std::to_string(i), "g" + std::to_string(i),
                       rng.uniform() * 0.5});
  }
  auto first = bin_and_sample_pairs(records, 10, 99);
  auto second = bin_and_sample_pairs(records, 10, 99);
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].source_frame == second[i].source_frame);
    CHECK(first[i].overlap == second[i].overlap);
  }
  // Subset + bin membership, and no duplicates.
  std::set<std::string> seen;
  for (const auto& rec : first) {
    CHECK(classify_overlap(rec.overlap).has_value());
    bool in_input = false;
    for (const auto& src : records) {
      if (src.source_frame == rec.source_frame && src.overlap == rec.overlap) {
        in_input = true;
      }
    }
    CHECK(in_input);
    CHECK(seen.insert(rec.source_frame).second);
  }

  auto other_seed = bin_and_sample_pairs(records, 10, 100);
  bool differs = false;
  for (size_t i = 0; i < first.size() && i < other_seed.size(); ++i) {
    if (first[i].source_frame != other_seed[i].source_frame) differs = true;
  }
  CHECK(differs);
}

namespace {

CovisiblePoint covis(double us, double vs, double ut, double vt) {
  CovisiblePoint p;
  p.source_px = Vec2(us, vs);
  p.target_px = Vec2(ut, vt);
  p.source_depth = 1.0;
  p.target_depth = 1.0;
  return p;
}

}  // namespace

TEST_CASE("keypoint flip criterion matches the worked examples") {
  // Accepted: product -12000 < 0 and |delta u_T| = 120 >= 50.
  CHECK(keypoint_pair_flips(covis(100, 0, 300, 0), covis(200, 0, 180, 0), 50));
  // Rejected: |delta u_T| = 30 < tau.
  CHECK(!keypoint_pair_flips(covis(100, 0, 210, 0), covis(200, 0, 180, 0), 50));
  // Rejected: no flip (product > 0).
  CHECK(!keypoint_pair_flips(covis(100, 0, 180, 0), covis(200, 0, 300, 0), 50));
}

TEST_CASE("keypoint selection samples only qualifying pairs") {
  std::vector<CovisiblePoint> candidates;
  for (int i = 0; i < 20; ++i) {
    candidates.push_back(covis(10.0 * i, 5, 10.0 * i, 5));  // never flips
  }
  CHECK(!select_keypoint_pair(candidates, 50, 3).has_value());

  candidates.push_back(covis(100, 0, 300, 0));
  candidates.push_back(covis(200, 0, 180, 0));
  auto pair = select_keypoint_pair(candidates, 50, 3);
  REQUIRE(pair.has_value());
  CHECK(keypoint_pair_flips(pair->a, pair->b, 50));
}

TEST_CASE("keypoint selection is deterministic per seed") {
  std::vector<CovisiblePoint> candidates;
  CounterRng rng(41);
  for (int i = 0; i < 50; ++i) {
    double us = rng.uniform() * 128, ut = rng.uniform() * 128;
    candidates.push_back(covis(us, 5, ut, 5));
  }
  candidates.push_back(covis(100, 0, 300, 0));
  candidates.push_back(covis(200, 0, 180, 0));
  auto first = select_keypoint_pair(candidates, 50, 9);
  auto second = select_keypoint_pair(candidates, 50, 9);
  REQUIRE(first.has_value());
  REQUIRE(second.has_value());
  CHECK(first->a.source_px.x() == second->a.source_px.x());
  CHECK(first->b.source_px.x() == second->b.source_px.x());
}

TEST_CASE("geometry oracle reproduces the two-depth flip example") {
  CameraIntrinsics K = k0();
  DepthMap depth(128, 128, 0.f);
  for (int y = 0; y < 128; ++y) {
    for (int x = 0; x < 128; ++x) depth.set_value(x, y, x >= 64 ? 1.f : 4.f);
  }
  // A at u=70 (depth 1), B at u=60 (depth 4); target 0.2 m to the right.
  RigidTransform s2t =
      relative_pose(CameraPose::identity(), camera_at(Vec3(0.2, 0, 0)),
                    PoseDirection::kSourceToTarget)
          .transform;
  LeftRight side = geometry_oracle(Vec2(70, 40), Vec2(60, 40), depth, s2t, K);
  CHECK(side == LeftRight::kLeft);  // warped u_A = 50 < u_B = 55
}

TEST_CASE("geometry oracle under identity preserves source ordering") {
  CameraIntrinsics K = k0();
  DepthMap depth = twtest::constant_depth(128, 128, 2.f);
  CHECK(geometry_oracle(Vec2(30, 40), Vec2(90, 40), depth,
                        RigidTransform::identity(), K) == LeftRight::kLeft);
  CHECK(geometry_oracle(Vec2(90, 40), Vec2(30, 40), depth,
                        RigidTransform::identity(), K) == LeftRight::kRight);
}

TEST_CASE("geometry oracle rejects keypoints on invalid depth") {
  CameraIntrinsics K = k0();
  DepthMap depth(128, 128, 0.f);
  CHECK_THROWS_AS(geometry_oracle(Vec2(10, 10), Vec2(20, 20), depth,
                                  RigidTransform::identity(), K),
                  Error);
}

TEST_CASE("covisible points carry both projections") {
  CameraIntrinsics K = k0();
  ScenePoints points{Vec3(0, 0, 2), Vec3(0.2, 0, 2)};
  CameraPose source = CameraPose::identity();
  CameraPose target = camera_at(Vec3(0.2, 0, 0));
  DepthMap depth = twtest::constant_depth(128, 128, 2.1f);
  VisibleSet vs = visible_set(points, source, K, depth, 0.02);
  VisibleSet vt = visible_set(points, target, K, depth, 0.02);
  auto covisible = covisible_points(points, vs, vt, source, target, K);
  REQUIRE(covisible.size() == 2);
  CHECK(covisible[0].source_px.x() == doctest::Approx(64.0));
  CHECK(covisible[0].target_px.x() == doctest::Approx(54.0));
  CHECK(covisible[0].source_depth == doctest::Approx(2.0));
}
