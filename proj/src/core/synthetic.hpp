#pragma once

#include <optional>
#include <vector>

#include "core/geometry.hpp"
#include "core/image.hpp"

namespace tokenwarp {

// Fronto-parallel plane segment at constant source-frame depth, owning the
// source pixel columns [col_begin, col_end).
struct PlaneRegion {
  double z = 0.0;
  int col_begin = 0;
  int col_end = 0;
};

struct CheckerParams {
  int period = 16;  // pixels per checker cell
  Rgb color_a = {235, 235, 235};
  Rgb color_b = {40, 40, 40};
};

// Deterministic RGB-D fixture with an exact piecewise-planar description.
// The source camera is the world frame (identity pose).
struct SyntheticScene {
  Image image;
  DepthMap depth;
  CameraIntrinsics intrinsics;
  CameraPose source_pose;
  CameraPose target_pose;
  std::vector<PlaneRegion> planes;  // empty => not piecewise-planar
};

SyntheticScene gen_plane_scene(const CameraIntrinsics& K, double z,
                               const CheckerParams& texture,
                               const CameraPose& target_pose);

// Left region [0, split_col) sits at z_far, right region at z_near. The two
// regions carry opposite checker phases so they are visually distinct.
SyntheticScene gen_two_plane_scene(const CameraIntrinsics& K, double z_near,
                                   double z_far, int split_col,
                                   const CheckerParams& texture,
                                   const CameraPose& target_pose);

// Closed-form backward correspondence: intersects the target-camera ray
// through the given coordinate with the scene planes (nearest hit whose
// source projection lands in the owning column range and inside the image).
// Returns nullopt when no plane answers; throws NonPlanarScene when the
// scene has no analytic description.
std::optional<Vec2> analytic_backward_oracle(const SyntheticScene& scene,
                                             const Vec2& target_coord);

// Target-frame depth along the same ray (z of the nearest valid hit).
std::optional<double> analytic_target_depth(const SyntheticScene& scene,
                                            const Vec2& target_coord);

// Ground-truth target view rendered through the analytic correspondence;
// pixels with no source counterpart take the fill color.
Image render_target_view(const SyntheticScene& scene, Rgb fill = {0, 0, 0});

// Exact target-view depth map (invalid where no plane is visible).
DepthMap render_target_depth(const SyntheticScene& scene);

}  // namespace tokenwarp
