#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/error.hpp"

namespace tokenwarp {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// Pinhole intrinsics, zero skew. Pixel coordinates are continuous with the
// center of integer pixel (u, v) at (u + 0.5, v + 0.5).
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
};

// Rigid SE(3) transform y = R x + t. Rotation is checked orthonormal with
// det +1 on construction.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  RigidTransform(const Mat3& rotation, const Vec3& translation,
                 double tolerance = 1e-6);

  static RigidTransform identity() { return RigidTransform(); }

  // Builds from a homogeneous 4x4; the rotation block is projected onto the
  // nearest rotation when it passes the (looser) load tolerance.
  static RigidTransform from_matrix(const Mat4& m, double tolerance);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  RigidTransform inverse() const;
  RigidTransform compose(const RigidTransform& inner) const;  // this ∘ inner
  Mat4 matrix() const;

  bool is_identity(double tol = 1e-12) const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

// Camera poses are stored world-to-camera throughout.
using CameraPose = RigidTransform;

enum class PoseDirection { kSourceToTarget, kTargetToSource };

struct RelativePose {
  RigidTransform transform;
  PoseDirection direction = PoseDirection::kSourceToTarget;
};

RelativePose relative_pose(const CameraPose& source, const CameraPose& target,
                           PoseDirection direction);

// Both directions of a relative pose; the pair is kept consistent so callers
// cannot mix a transform with the wrong inverse.
struct RelativePosePair {
  RigidTransform source_to_target;
  RigidTransform target_to_source;

  static RelativePosePair between(const CameraPose& source,
                                  const CameraPose& target);
  static RelativePosePair from(const RelativePose& rel);
  static RelativePosePair identity();
};

// (fx x/z + cx, fy y/z + cy); throws NonPositiveDepth for z <= 0.
Vec2 project_point(const Vec3& point_camera, const CameraIntrinsics& K);

// Inverse of project_point at the given depth; throws InvalidDepth for
// d <= 0 or non-finite d.
Vec3 unproject_pixel(const Vec2& pixel, double depth,
                     const CameraIntrinsics& K);

// Fixed non-overlapping grid of patch_size x patch_size cells. Cell (r, k)
// has center (k*l + l/2, r*l + l/2); cells are indexed row-major.
class PatchGrid {
 public:
  // Throws IndivisibleResolution unless patch_size divides both dimensions.
  static PatchGrid create(int image_height, int image_width, int patch_size);

  int patch_size() const { return patch_size_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int cell_count() const { return rows_ * cols_; }
  int image_width() const { return cols_ * patch_size_; }
  int image_height() const { return rows_ * patch_size_; }

  int index(int row, int col) const { return row * cols_ + col; }
  Vec2 center(int row, int col) const;
  Vec2 center(int index) const;
  std::vector<Vec2> centers() const;  // row-major

 private:
  PatchGrid(int rows, int cols, int patch_size)
      : rows_(rows), cols_(cols), patch_size_(patch_size) {}

  int rows_;
  int cols_;
  int patch_size_;
};

}  // namespace tokenwarp
