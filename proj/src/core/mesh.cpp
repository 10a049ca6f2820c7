#include "core/mesh.hpp"

#include <algorithm>

namespace tokenwarp {

ProxyMesh build_mesh(const DepthMap& depth, const CameraIntrinsics& K,
                     const MeshBuildOptions& options) {
  K.validate();
  if (depth.width() != K.width || depth.height() != K.height) {
    fail(ErrorCode::kDimensionMismatch, "depth dimensions do not match intrinsics");
  }

  const int w = depth.width();
  const int h = depth.height();

  ProxyMesh mesh;
  std::vector<int> vertex_of(static_cast<size_t>(w) * h, -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!depth.valid(x, y)) continue;
      Vec2 pixel_center(x + 0.5, y + 0.5);
      vertex_of[static_cast<size_t>(y) * w + x] =
          static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(
          unproject_pixel(pixel_center, depth.value(x, y), K));
      mesh.vertex_pixels.push_back(pixel_center);
    }
  }
  if (mesh.vertices.empty()) {
    fail(ErrorCode::kEmptyDepth, "depth map has no valid pixels");
  }

  auto keep = [&](int a, int b, int c) {
    if (a < 0 || b < 0 || c < 0) return false;
    if (options.depth_ratio_cull > 0.0) {
      double za = mesh.vertices[a].z();
      double zb = mesh.vertices[b].z();
      double zc = mesh.vertices[c].z();
      double zmin = std::min({za, zb, zc});
      double zmax = std::max({za, zb, zc});
      if (zmax / zmin > options.depth_ratio_cull) return false;
    }
    return true;
  };

  for (int y = 0; y + 1 < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) {
      int tl = vertex_of[static_cast<size_t>(y) * w + x];
      int tr = vertex_of[static_cast<size_t>(y) * w + x + 1];
      int bl = vertex_of[static_cast<size_t>(y + 1) * w + x];
      int br = vertex_of[static_cast<size_t>(y + 1) * w + x + 1];
      if (keep(tl, bl, tr)) mesh.triangles.push_back({tl, bl, tr});
      if (keep(tr, bl, br)) mesh.triangles.push_back({tr, bl, br});
    }
  }
  return mesh;
}

ProxyMesh transform_mesh(const ProxyMesh& mesh, const RigidTransform& transform) {
  ProxyMesh out;
  out.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) out.vertices.push_back(transform.apply(v));
  out.triangles = mesh.triangles;
  out.vertex_pixels = mesh.vertex_pixels;
  return out;
}

}  // namespace tokenwarp
