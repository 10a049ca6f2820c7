#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/image.hpp"

namespace tokenwarp {

// World-frame scene points.
using ScenePoints = std::vector<Vec3>;

// Sorted, duplicate-free indices into a ScenePoints list.
using VisibleSet = std::vector<int>;

// A point is visible when it lands in front of the camera, projects inside
// the image, hits a valid depth sample, and sits no deeper than the stored
// depth plus the occlusion tolerance. tolerance = 0 is the strict rule.
VisibleSet visible_set(const ScenePoints& points, const CameraPose& pose,
                       const CameraIntrinsics& K, const DepthMap& depth,
                       double occlusion_tolerance);

// IoU of two visible sets; 0 when both are empty.
double overlap_ratio(const VisibleSet& a, const VisibleSet& b);

struct ViewPairRecord {
  std::string source_frame;
  std::string target_frame;
  double overlap = 0.0;
};

enum class OverlapBin { k5to15 = 0, k15to25 = 1, k25to35 = 2 };

// Half-open bins [0.05,0.15), [0.15,0.25), [0.25,0.35); nullopt outside.
std::optional<OverlapBin> classify_overlap(double ratio);
const char* overlap_bin_name(OverlapBin bin);

// Drops pairs outside [0.05, 0.35), then samples up to per_bin pairs
// uniformly without replacement from each bin. Deterministic in seed.
std::vector<ViewPairRecord> bin_and_sample_pairs(
    std::span<const ViewPairRecord> records, int per_bin, uint64_t seed);

// A scene point observed in both views, with projections and depths.
struct CovisiblePoint {
  int point_index = -1;
  Vec2 source_px = Vec2::Zero();
  Vec2 target_px = Vec2::Zero();
  double source_depth = 0.0;  // camera-frame z
  double target_depth = 0.0;
};

// Projects the points of V_S ∩ V_T into both views.
std::vector<CovisiblePoint> covisible_points(const ScenePoints& points,
                                             const VisibleSet& source_visible,
                                             const VisibleSet& target_visible,
                                             const CameraPose& source_pose,
                                             const CameraPose& target_pose,
                                             const CameraIntrinsics& K);

struct KeypointPair {
  CovisiblePoint a;
  CovisiblePoint b;
};

// Samples candidate pairs until the left-right relation flips between views
// and the target separation reaches tau px:
//   (u_A^S - u_B^S)(u_A^T - u_B^T) < 0  and  |u_A^T - u_B^T| >= tau.
// Gives up after 10 * |candidates| draws.
std::optional<KeypointPair> select_keypoint_pair(
    std::span<const CovisiblePoint> candidates, double tau, uint64_t seed);

bool keypoint_pair_flips(const CovisiblePoint& a, const CovisiblePoint& b,
                         double tau);

enum class LeftRight { kLeft, kRight };
inline const char* left_right_name(LeftRight v) {
  return v == LeftRight::kLeft ? "left" : "right";
}

// MLLM-free answer: unproject both keypoints at their source depths,
// transform source->target, project, and compare x-coordinates. "left" when
// the warped A lands left of the warped B. Throws InvalidDepthAtKeypoint
// when a source depth read is invalid.
LeftRight geometry_oracle(const Vec2& a_source_px, const Vec2& b_source_px,
                          const DepthMap& source_depth,
                          const RigidTransform& source_to_target,
                          const CameraIntrinsics& K);

LeftRight geometry_oracle(const KeypointPair& pair, const DepthMap& source_depth,
                          const RigidTransform& source_to_target,
                          const CameraIntrinsics& K);

}  // namespace tokenwarp
