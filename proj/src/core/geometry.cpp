#include "core/geometry.hpp"

#include <cmath>

namespace tokenwarp {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    fail(ErrorCode::kInvalidArgument, "intrinsics must have finite positive focal lengths");
  }
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidArgument, "intrinsics must have positive image size");
  }
}

namespace {

bool rotation_ok(const Mat3& r, double tol) {
  Mat3 delta = r.transpose() * r - Mat3::Identity();
  return delta.cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation,
                               double tolerance)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    fail(ErrorCode::kNonRigidPose, "pose contains non-finite entries");
  }
  if (!rotation_ok(rotation, tolerance)) {
    fail(ErrorCode::kNonRigidPose, "rotation is not orthonormal with det +1");
  }
}

RigidTransform RigidTransform::from_matrix(const Mat4& m, double tolerance) {
  if (!m.allFinite()) {
    fail(ErrorCode::kNonRigidPose, "pose matrix contains non-finite entries");
  }
  Eigen::RowVector4d bottom = m.row(3);
  if ((bottom - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-6) {
    fail(ErrorCode::kNonRigidPose, "pose matrix bottom row is not (0 0 0 1)");
  }
  Mat3 r = m.topLeftCorner<3, 3>();
  if (!rotation_ok(r, tolerance)) {
    fail(ErrorCode::kNonRigidPose, "rotation is not orthonormal with det +1");
  }
  // Snap to the nearest rotation so downstream invariants hold at 1e-6 even
  // when the file only met the load tolerance.
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  Mat3 s = Mat3::Identity();
  s(2, 2) = (u * v.transpose()).determinant() < 0 ? -1.0 : 1.0;
  return RigidTransform(u * s * v.transpose(), m.topRightCorner<3, 1>());
}

RigidTransform RigidTransform::inverse() const {
  Mat3 rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_));
}

RigidTransform RigidTransform::compose(const RigidTransform& inner) const {
  return RigidTransform(rotation_ * inner.rotation_,
                        rotation_ * inner.translation_ + translation_);
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

bool RigidTransform::is_identity(double tol) const {
  return (rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         translation_.cwiseAbs().maxCoeff() <= tol;
}

RelativePose relative_pose(const CameraPose& source, const CameraPose& target,
                           PoseDirection direction) {
  if (direction == PoseDirection::kSourceToTarget) {
    return {target.compose(source.inverse()), direction};
  }
  return {source.compose(target.inverse()), direction};
}

RelativePosePair RelativePosePair::between(const CameraPose& source,
                                           const CameraPose& target) {
  RelativePosePair pair;
  pair.source_to_target = target.compose(source.inverse());
  pair.target_to_source = source.compose(target.inverse());
  return pair;
}

RelativePosePair RelativePosePair::from(const RelativePose& rel) {
  RelativePosePair pair;
  if (rel.direction == PoseDirection::kSourceToTarget) {
    pair.source_to_target = rel.transform;
    pair.target_to_source = rel.transform.inverse();
  } else {
    pair.target_to_source = rel.transform;
    pair.source_to_target = rel.transform.inverse();
  }
  return pair;
}

RelativePosePair RelativePosePair::identity() {
  return {RigidTransform::identity(), RigidTransform::identity()};
}

Vec2 project_point(const Vec3& point_camera, const CameraIntrinsics& K) {
  if (!(point_camera.z() > 0.0)) {
    fail(ErrorCode::kNonPositiveDepth, "cannot project a point with z <= 0");
  }
  double inv_z = 1.0 / point_camera.z();
  return {K.fx * point_camera.x() * inv_z + K.cx,
          K.fy * point_camera.y() * inv_z + K.cy};
}

Vec3 unproject_pixel(const Vec2& pixel, double depth,
                     const CameraIntrinsics& K) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    fail(ErrorCode::kInvalidDepth, "depth must be positive and finite");
  }
  return {(pixel.x() - K.cx) / K.fx * depth, (pixel.y() - K.cy) / K.fy * depth,
          depth};
}

PatchGrid PatchGrid::create(int image_height, int image_width, int patch_size) {
  if (patch_size < 1) {
    fail(ErrorCode::kInvalidArgument, "patch size must be >= 1");
  }
  if (image_height <= 0 || image_width <= 0 ||
      image_height % patch_size != 0 || image_width % patch_size != 0) {
    fail(ErrorCode::kIndivisibleResolution,
         "patch size must divide both image dimensions");
  }
  return PatchGrid(image_height / patch_size, image_width / patch_size,
                   patch_size);
}

Vec2 PatchGrid::center(int row, int col) const {
  double half = patch_size_ * 0.5;
  return {col * patch_size_ + half, row * patch_size_ + half};
}

Vec2 PatchGrid::center(int index) const {
  return center(index / cols_, index % cols_);
}

std::vector<Vec2> PatchGrid::centers() const {
  std::vector<Vec2> out;
  out.reserve(cell_count());
  for (int r = 0; r < rows_; ++r) {
    for (int k = 0; k < cols_; ++k) out.push_back(center(r, k));
  }
  return out;
}

}  // namespace tokenwarp
