#pragma once

#include <string>

#include "core/geometry.hpp"
#include "core/image.hpp"

namespace tokenwarp {

enum class PoseConvention { kWorldToCamera, kCameraToWorld };

struct FramePaths {
  std::string id;
  std::string image;
  std::string depth;
  std::string pose;
  std::string intrinsics;
};

// Source inputs for one posed RGB-D frame. Poses are normalized to
// world-to-camera on load; depth and image dimensions must agree.
struct FrameBundle {
  std::string id;
  Image image;
  DepthMap depth;
  CameraPose pose;
  CameraIntrinsics intrinsics;
};

// 4x4 row-major whitespace-separated text; camera-to-world inputs are
// inverted. Rotations must be orthonormal within 1e-3 (NonRigidPose).
CameraPose load_pose_text(const std::string& path, PoseConvention convention);
void save_pose_text(const CameraPose& pose, PoseConvention convention,
                    const std::string& path);

struct IntrinsicsParams {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
};

// Accepts "fx fy cx cy" or a full 3x3 matrix (zero skew enforced).
IntrinsicsParams parse_intrinsics_text(const std::string& content);
IntrinsicsParams load_intrinsics_text(const std::string& path);
void save_intrinsics_text(const CameraIntrinsics& K, const std::string& path);

// 16-bit PNG (value * depth_scale meters, 0 invalid) or PFM (meters) picked
// by file extension.
DepthMap load_depth_file(const std::string& path, double depth_scale);
void save_depth_png16(const DepthMap& depth, double depth_scale,
                      const std::string& path);

FrameBundle load_frame(const FramePaths& paths, PoseConvention convention,
                       double depth_scale);

// World-frame scene points as "x y z" text lines ('#' starts a comment).
std::vector<Vec3> load_points_text(const std::string& path);
void save_points_text(const std::vector<Vec3>& points, const std::string& path);

}  // namespace tokenwarp
