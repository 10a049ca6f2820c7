#pragma once

#include <array>
#include <vector>

#include "core/geometry.hpp"
#include "core/image.hpp"

namespace tokenwarp {

struct MeshBuildOptions {
  // Drop triangles whose max/min vertex depth ratio exceeds this threshold.
  // 0 disables culling (rubber-sheet triangles across discontinuities stay).
  double depth_ratio_cull = 0.0;
};

// Triangulated depth surface: one vertex per valid-depth pixel, unprojected
// at the pixel center, each 2x2 cell split into (TL,BL,TR) and (TR,BL,BR).
struct ProxyMesh {
  std::vector<Vec3> vertices;                 // camera frame of the source
  std::vector<std::array<int, 3>> triangles;  // indices into vertices
  std::vector<Vec2> vertex_pixels;            // source pixel coordinate per vertex

  size_t vertex_count() const { return vertices.size(); }
  size_t triangle_count() const { return triangles.size(); }
};

// Throws EmptyDepth when no pixel carries valid depth, DimensionMismatch when
// the depth raster does not match the intrinsics.
ProxyMesh build_mesh(const DepthMap& depth, const CameraIntrinsics& K,
                     const MeshBuildOptions& options = {});

// Applies v -> R v + t to every vertex; topology and pixel tags unchanged.
ProxyMesh transform_mesh(const ProxyMesh& mesh, const RigidTransform& transform);

}  // namespace tokenwarp
