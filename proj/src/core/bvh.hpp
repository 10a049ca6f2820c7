#pragma once

#include <optional>
#include <vector>

#include "core/mesh.hpp"

namespace tokenwarp {

// Minimum accepted ray parameter; rejects self-intersections at the origin.
inline constexpr double kRayEpsilon = 1e-6;
// Determinant threshold below which a ray counts as parallel to a triangle.
inline constexpr double kParallelEpsilon = 1e-12;
// Slack on barycentric bounds so shared edges are hit from both triangles.
inline constexpr double kBaryEpsilon = 1e-9;

struct RayHit {
  double t = 0.0;
  Vec3 point = Vec3::Zero();
  int triangle = -1;
  Vec3 barycentric = Vec3::Zero();  // weights for vertices 0,1,2
};

// Möller-Trumbore, no backface culling. Returns the hit with t > t_min, or
// nullopt. Both the BVH and the brute-force path in the tests go through
// this exact function so their results are bit-comparable.
std::optional<RayHit> intersect_triangle(const Vec3& origin, const Vec3& dir,
                                         const Vec3& v0, const Vec3& v1,
                                         const Vec3& v2,
                                         double t_min = kRayEpsilon);

// Bounding volume hierarchy over a mesh snapshot. Immutable after build;
// cast_ray is safe for concurrent callers.
class MeshBvh {
 public:
  explicit MeshBvh(const ProxyMesh& mesh);

  // Closest hit with t > kRayEpsilon; equal-t candidates resolve to the
  // smallest triangle index. direction must be unit length within 1e-9
  // (DegenerateDirection otherwise).
  std::optional<RayHit> cast_ray(const Vec3& origin, const Vec3& direction) const;

  size_t triangle_count() const { return tri_vertices_.size(); }

 private:
  struct Node {
    Vec3 lower = Vec3::Zero();
    Vec3 upper = Vec3::Zero();
    int left = -1;    // internal: child index; leaf: first triangle slot
    int right = -1;   // internal: child index; leaf: -1
    int count = 0;    // leaf: triangle count; internal: 0
  };

  int build_node(std::vector<int>& order, int begin, int end);

  std::vector<std::array<Vec3, 3>> tri_vertices_;
  std::vector<int> tri_index_;  // slot -> original triangle index
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace tokenwarp
