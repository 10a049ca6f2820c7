#include "core/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tokenwarp {

std::optional<RayHit> intersect_triangle(const Vec3& origin, const Vec3& dir,
                                         const Vec3& v0, const Vec3& v1,
                                         const Vec3& v2, double t_min) {
  Vec3 e1 = v1 - v0;
  Vec3 e2 = v2 - v0;
  Vec3 pvec = dir.cross(e2);
  double det = e1.dot(pvec);
  if (std::abs(det) < kParallelEpsilon) return std::nullopt;
  double inv_det = 1.0 / det;
  Vec3 tvec = origin - v0;
  double u = tvec.dot(pvec) * inv_det;
  if (u < -kBaryEpsilon || u > 1.0 + kBaryEpsilon) return std::nullopt;
  Vec3 qvec = tvec.cross(e1);
  double v = dir.dot(qvec) * inv_det;
  if (v < -kBaryEpsilon || u + v > 1.0 + kBaryEpsilon) return std::nullopt;
  double t = e2.dot(qvec) * inv_det;
  if (!(t > t_min)) return std::nullopt;
  RayHit hit;
  hit.t = t;
  hit.point = origin + t * dir;
  hit.barycentric = Vec3(1.0 - u - v, u, v);
  return hit;
}

MeshBvh::MeshBvh(const ProxyMesh& mesh) {
  size_t n = mesh.triangles.size();
  tri_vertices_.reserve(n);
  tri_index_.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& t = mesh.triangles[i];
    tri_vertices_.push_back(
        {mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]});
    tri_index_.push_back(static_cast<int>(i));
  }
  if (n == 0) return;

  std::vector<int> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  nodes_.reserve(2 * n);
  root_ = build_node(order, 0, static_cast<int>(n));

  // Reorder triangle storage to match leaf layout.
  std::vector<std::array<Vec3, 3>> verts(n);
  std::vector<int> index(n);
  for (size_t i = 0; i < n; ++i) {
    verts[i] = tri_vertices_[order[i]];
    index[i] = tri_index_[order[i]];
  }
  tri_vertices_ = std::move(verts);
  tri_index_ = std::move(index);
}

int MeshBvh::build_node(std::vector<int>& order, int begin, int end) {
  Node node;
  Vec3 lower = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 upper = -lower;
  for (int i = begin; i < end; ++i) {
    for (const Vec3& v : tri_vertices_[order[i]]) {
      lower = lower.cwiseMin(v);
      upper = upper.cwiseMax(v);
    }
  }
  // Pad so rays grazing a box face exactly are not lost to rounding.
  double pad = 1e-9 * std::max(1.0, std::max(lower.cwiseAbs().maxCoeff(),
                                             upper.cwiseAbs().maxCoeff()));
  node.lower = lower.array() - pad;
  node.upper = upper.array() + pad;

  int count = end - begin;
  if (count <= 4) {
    node.left = begin;
    node.right = -1;
    node.count = count;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  Vec3 extent = upper - lower;
  int axis = 0;
  if (extent.y() > extent.x()) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;

  int mid = begin + count / 2;
  std::nth_element(order.begin() + begin, order.begin() + mid,
                   order.begin() + end, [&](int a, int b) {
                     auto centroid = [&](int idx) {
                       const auto& tv = tri_vertices_[idx];
                       return tv[0][axis] + tv[1][axis] + tv[2][axis];
                     };
                     double ca = centroid(a);
                     double cb = centroid(b);
                     if (ca != cb) return ca < cb;
                     return a < b;  // stable order for degenerate layouts
                   });

  int node_index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  int left = build_node(order, begin, mid);
  int right = build_node(order, mid, end);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  nodes_[node_index].count = 0;
  return node_index;
}

namespace {

// Slab test; returns entry parameter or +inf on miss. fmin/fmax absorb the
// NaNs produced by 0 * inf when the ray starts on a slab plane.
double box_entry(const Vec3& lower, const Vec3& upper, const Vec3& origin,
                 const Vec3& inv_dir, double t_max) {
  double tmin = 0.0;
  double tmax = t_max;
  for (int a = 0; a < 3; ++a) {
    double t1 = (lower[a] - origin[a]) * inv_dir[a];
    double t2 = (upper[a] - origin[a]) * inv_dir[a];
    tmin = std::fmax(tmin, std::fmin(t1, t2));
    tmax = std::fmin(tmax, std::fmax(t1, t2));
  }
  if (tmin > tmax) return std::numeric_limits<double>::infinity();
  return tmin;
}

}  // namespace

std::optional<RayHit> MeshBvh::cast_ray(const Vec3& origin,
                                        const Vec3& direction) const {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    fail(ErrorCode::kDegenerateDirection, "ray direction must be unit length");
  }
  if (root_ < 0) return std::nullopt;

  Vec3 inv_dir(1.0 / direction.x(), 1.0 / direction.y(), 1.0 / direction.z());
  std::optional<RayHit> best;
  double best_t = std::numeric_limits<double>::infinity();

  std::vector<int> stack;
  stack.reserve(64);
  stack.push_back(root_);
  constexpr double kMiss = std::numeric_limits<double>::infinity();
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    double entry = box_entry(node.lower, node.upper, origin, inv_dir, best_t);
    if (entry == kMiss || entry > best_t) continue;
    if (node.count > 0) {
      for (int s = node.left; s < node.left + node.count; ++s) {
        const auto& tv = tri_vertices_[s];
        auto hit = intersect_triangle(origin, direction, tv[0], tv[1], tv[2]);
        if (!hit) continue;
        int tri = tri_index_[s];
        if (hit->t < best_t ||
            (hit->t == best_t && best && tri < best->triangle)) {
          best = *hit;
          best->triangle = tri;
          best_t = hit->t;
        }
      }
      continue;
    }
    // Visit the nearer child first so occluded geometry prunes early.
    double dl = box_entry(nodes_[node.left].lower, nodes_[node.left].upper,
                          origin, inv_dir, best_t);
    double dr = box_entry(nodes_[node.right].lower, nodes_[node.right].upper,
                          origin, inv_dir, best_t);
    int first = node.left;
    int second = node.right;
    if (dr < dl) std::swap(first, second);
    stack.push_back(second);
    stack.push_back(first);
  }
  return best;
}

}  // namespace tokenwarp
