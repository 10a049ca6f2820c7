#include "core/synthetic.hpp"

#include <cmath>
#include <limits>

namespace tokenwarp {

namespace {

Rgb checker_color(const CheckerParams& texture, int x, int y, int phase) {
  int cell = (x / texture.period + y / texture.period + phase) & 1;
  return cell == 0 ? texture.color_a : texture.color_b;
}

SyntheticScene make_scene(const CameraIntrinsics& K,
                          const std::vector<PlaneRegion>& planes,
                          const CheckerParams& texture,
                          const CameraPose& target_pose) {
  K.validate();
  SyntheticScene scene;
  scene.intrinsics = K;
  scene.source_pose = CameraPose::identity();
  scene.target_pose = target_pose;
  scene.planes = planes;
  scene.image = Image(K.width, K.height);
  scene.depth = DepthMap(K.width, K.height);
  for (size_t r = 0; r < planes.size(); ++r) {
    const PlaneRegion& region = planes[r];
    for (int y = 0; y < K.height; ++y) {
      for (int x = region.col_begin; x < region.col_end; ++x) {
        scene.image.set_pixel(x, y,
                              checker_color(texture, x, y, static_cast<int>(r)));
        scene.depth.set_value(x, y, static_cast<float>(region.z));
      }
    }
  }
  return scene;
}

struct OracleHit {
  double ray_param = 0.0;  // equals target-frame depth (direction has z = 1)
  Vec2 source_coord = Vec2::Zero();
};

std::optional<OracleHit> oracle_hit(const SyntheticScene& scene,
                                    const Vec2& target_coord) {
  if (scene.planes.empty()) {
    fail(ErrorCode::kNonPlanarScene, "scene carries no analytic plane description");
  }
  const CameraIntrinsics& K = scene.intrinsics;
  RelativePosePair rel =
      RelativePosePair::between(scene.source_pose, scene.target_pose);

  // Target-camera ray expressed in the source frame; leaving the direction
  // unnormalized (z = 1 in the target frame) makes the ray parameter equal
  // the target-frame depth.
  Vec3 dir_target((target_coord.x() - K.cx) / K.fx,
                  (target_coord.y() - K.cy) / K.fy, 1.0);
  Vec3 origin = rel.target_to_source.translation();
  Vec3 dir = rel.target_to_source.rotation() * dir_target;

  std::optional<OracleHit> best;
  for (const PlaneRegion& region : scene.planes) {
    if (std::abs(dir.z()) < 1e-15) continue;
    double s = (region.z - origin.z()) / dir.z();
    if (!(s > 1e-12)) continue;
    Vec3 hit = origin + s * dir;
    Vec2 uv = project_point(hit, K);
    if (uv.x() < region.col_begin || uv.x() >= region.col_end) continue;
    if (uv.y() < 0.0 || uv.y() >= K.height) continue;
    if (!best || s < best->ray_param) best = OracleHit{s, uv};
  }
  return best;
}

}  // namespace

SyntheticScene gen_plane_scene(const CameraIntrinsics& K, double z,
                               const CheckerParams& texture,
                               const CameraPose& target_pose) {
  if (!(z > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "plane depth must be positive");
  }
  return make_scene(K, {{z, 0, K.width}}, texture, target_pose);
}

SyntheticScene gen_two_plane_scene(const CameraIntrinsics& K, double z_near,
                                   double z_far, int split_col,
                                   const CheckerParams& texture,
                                   const CameraPose& target_pose) {
  if (!(0.0 < z_near) || !(z_near < z_far)) {
    fail(ErrorCode::kInvalidArgument, "need 0 < z_near < z_far");
  }
  if (split_col <= 0 || split_col >= K.width) {
    fail(ErrorCode::kInvalidArgument, "split column must be inside the image");
  }
  return make_scene(K,
                    {{z_far, 0, split_col}, {z_near, split_col, K.width}},
                    texture, target_pose);
}

std::optional<Vec2> analytic_backward_oracle(const SyntheticScene& scene,
                                             const Vec2& target_coord) {
  auto hit = oracle_hit(scene, target_coord);
  if (!hit) return std::nullopt;
  return hit->source_coord;
}

std::optional<double> analytic_target_depth(const SyntheticScene& scene,
                                            const Vec2& target_coord) {
  auto hit = oracle_hit(scene, target_coord);
  if (!hit) return std::nullopt;
  return hit->ray_param;
}

Image render_target_view(const SyntheticScene& scene, Rgb fill) {
  Image out(scene.intrinsics.width, scene.intrinsics.height, fill);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      auto src = analytic_backward_oracle(scene, Vec2(x + 0.5, y + 0.5));
      if (!src) continue;
      // Nearest read reproduces the painted texture exactly.
      out.set_pixel(x, y, scene.image.nearest(src->x(), src->y()));
    }
  }
  return out;
}

DepthMap render_target_depth(const SyntheticScene& scene) {
  DepthMap out(scene.intrinsics.width, scene.intrinsics.height, 0.f);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      auto d = analytic_target_depth(scene, Vec2(x + 0.5, y + 0.5));
      if (d) out.set_value(x, y, static_cast<float>(*d));
    }
  }
  return out;
}

}  // namespace tokenwarp
