#include "core/warp.hpp"

#include <cmath>
#include <limits>

#include "core/parallel.hpp"

namespace tokenwarp {

std::vector<WarpEntry> backward_warp_points(std::span<const Vec2> target_coords,
                                            const ProxyMesh& source_mesh,
                                            const RelativePosePair& rel,
                                            const CameraIntrinsics& K,
                                            int threads) {
  if (source_mesh.triangles.empty()) {
    fail(ErrorCode::kEmptyDepth, "source mesh has no triangles");
  }
  ProxyMesh mesh_target = transform_mesh(source_mesh, rel.source_to_target);
  MeshBvh bvh(mesh_target);

  std::vector<WarpEntry> out(target_coords.size());
  parallel_for(static_cast<int>(target_coords.size()), threads, [&](int i) {
    Vec3 dir = unproject_pixel(target_coords[i], 1.0, K).normalized();
    auto hit = bvh.cast_ray(Vec3::Zero(), dir);
    if (!hit) return;
    Vec3 in_source = rel.target_to_source.apply(hit->point);
    if (!(in_source.z() > 0.0)) return;  // grazing hit folded behind the source
    out[i].valid = true;
    out[i].coord = project_point(in_source, K);
  });
  return out;
}

WarpField backward_warp_grid(const PatchGrid& target_grid,
                             const ProxyMesh& source_mesh,
                             const RelativePosePair& rel,
                             const CameraIntrinsics& K, int threads) {
  if (target_grid.image_width() != K.width ||
      target_grid.image_height() != K.height) {
    fail(ErrorCode::kDimensionMismatch, "grid resolution does not match intrinsics");
  }
  std::vector<Vec2> centers = target_grid.centers();
  std::vector<WarpEntry> entries =
      backward_warp_points(centers, source_mesh, rel, K, threads);
  WarpField field(WarpDomain::kTokenGrid, PoseDirection::kTargetToSource,
                  target_grid.rows(), target_grid.cols());
  for (int i = 0; i < field.size(); ++i) field.entry(i) = entries[i];
  return field;
}

WarpField forward_warp_grid(const PatchGrid& source_grid, const DepthMap& depth,
                            const RelativePosePair& rel,
                            const CameraIntrinsics& K) {
  if (source_grid.image_width() != depth.width() ||
      source_grid.image_height() != depth.height()) {
    fail(ErrorCode::kDimensionMismatch, "grid resolution does not match depth map");
  }
  WarpField field(WarpDomain::kTokenGrid, PoseDirection::kSourceToTarget,
                  source_grid.rows(), source_grid.cols());
  // Exactly-identity transforms reduce algebraically to c* = c; taking that
  // path sidesteps the rounding of project(unproject(c)).
  bool identity = rel.source_to_target.is_identity(0.0);
  for (int i = 0; i < field.size(); ++i) {
    Vec2 center = source_grid.center(i);
    float d = depth.at_nearest(center);
    if (!(d > 0.f)) continue;
    if (identity) {
      field.entry(i).valid = true;
      field.entry(i).coord = center;
      continue;
    }
    Vec3 in_target = rel.source_to_target.apply(unproject_pixel(center, d, K));
    if (!(in_target.z() > 0.0)) continue;
    field.entry(i).valid = true;
    field.entry(i).coord = project_point(in_target, K);
  }
  return field;
}

WarpedImage pixel_backward_warp_image(const Image& source,
                                      const ProxyMesh& source_mesh,
                                      const RelativePosePair& rel,
                                      const CameraIntrinsics& K,
                                      const PixelWarpOptions& options) {
  if (source.width() != K.width || source.height() != K.height) {
    fail(ErrorCode::kDimensionMismatch, "image resolution does not match intrinsics");
  }
  const int w = source.width();
  const int h = source.height();
  std::vector<Vec2> coords;
  coords.reserve(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) coords.emplace_back(x + 0.5, y + 0.5);
  }
  std::vector<WarpEntry> mapped =
      backward_warp_points(coords, source_mesh, rel, K, options.threads);

  WarpedImage out{Image(w, h, options.fill),
                  std::vector<uint8_t>(static_cast<size_t>(w) * h, 0)};
  for (int i = 0; i < w * h; ++i) {
    if (!mapped[i].valid) continue;
    auto rgb = source.bilinear(mapped[i].coord.x(), mapped[i].coord.y());
    out.image.set_pixel(i % w, i / w,
                        {static_cast<uint8_t>(std::lround(std::clamp(rgb[0], 0.0, 255.0))),
                         static_cast<uint8_t>(std::lround(std::clamp(rgb[1], 0.0, 255.0))),
                         static_cast<uint8_t>(std::lround(std::clamp(rgb[2], 0.0, 255.0)))});
    out.valid[i] = 1;
  }
  return out;
}

WarpedImage pixel_forward_warp_image(const Image& source, const DepthMap& depth,
                                     const RelativePosePair& rel,
                                     const CameraIntrinsics& K,
                                     const PixelWarpOptions& options) {
  if (source.width() != depth.width() || source.height() != depth.height()) {
    fail(ErrorCode::kDimensionMismatch, "image and depth dimensions differ");
  }
  if (source.width() != K.width || source.height() != K.height) {
    fail(ErrorCode::kDimensionMismatch, "image resolution does not match intrinsics");
  }
  const int w = source.width();
  const int h = source.height();
  WarpedImage out{Image(w, h, options.fill),
                  std::vector<uint8_t>(static_cast<size_t>(w) * h, 0)};
  std::vector<double> zbuf(static_cast<size_t>(w) * h,
                           std::numeric_limits<double>::infinity());

  // Sequential row-major scan keeps the z-buffer deterministic.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!depth.valid(x, y)) continue;
      Vec3 p = unproject_pixel(Vec2(x + 0.5, y + 0.5), depth.value(x, y), K);
      Vec3 q = rel.source_to_target.apply(p);
      if (!(q.z() > 0.0)) continue;
      Vec2 uv = project_point(q, K);
      int tx = static_cast<int>(std::floor(uv.x()));
      int ty = static_cast<int>(std::floor(uv.y()));
      if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
      size_t slot = static_cast<size_t>(ty) * w + tx;
      if (q.z() < zbuf[slot]) {
        zbuf[slot] = q.z();
        out.image.set_pixel(tx, ty, source.pixel(x, y));
        out.valid[slot] = 1;
      }
    }
  }
  return out;
}

}  // namespace tokenwarp
