#include "core/viewbench.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"

namespace tokenwarp {

VisibleSet visible_set(const ScenePoints& points, const CameraPose& pose,
                       const CameraIntrinsics& K, const DepthMap& depth,
                       double occlusion_tolerance) {
  K.validate();
  if (depth.width() != K.width || depth.height() != K.height) {
    fail(ErrorCode::kDimensionMismatch, "depth dimensions do not match intrinsics");
  }
  if (occlusion_tolerance < 0.0) {
    fail(ErrorCode::kInvalidArgument, "occlusion tolerance must be >= 0");
  }
  VisibleSet out;
  for (size_t i = 0; i < points.size(); ++i) {
    Vec3 pc = pose.apply(points[i]);
    if (!(pc.z() > 0.0)) continue;
    Vec2 uv = project_point(pc, K);
    if (uv.x() < 0.0 || uv.x() >= K.width || uv.y() < 0.0 || uv.y() >= K.height) {
      continue;
    }
    int px = nearest_pixel(uv.x(), K.width);
    int py = nearest_pixel(uv.y(), K.height);
    if (!depth.valid(px, py)) continue;
    if (pc.z() < depth.value(px, py) + occlusion_tolerance) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

double overlap_ratio(const VisibleSet& a, const VisibleSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<int> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(inter));
  size_t union_size = a.size() + b.size() - inter.size();
  return static_cast<double>(inter.size()) / static_cast<double>(union_size);
}

std::optional<OverlapBin> classify_overlap(double ratio) {
  if (ratio >= 0.05 && ratio < 0.15) return OverlapBin::k5to15;
  if (ratio >= 0.15 && ratio < 0.25) return OverlapBin::k15to25;
  if (ratio >= 0.25 && ratio < 0.35) return OverlapBin::k25to35;
  return std::nullopt;
}

const char* overlap_bin_name(OverlapBin bin) {
  switch (bin) {
    case OverlapBin::k5to15: return "5-15";
    case OverlapBin::k15to25: return "15-25";
    case OverlapBin::k25to35: return "25-35";
  }
  return "?";
}

std::vector<ViewPairRecord> bin_and_sample_pairs(
    std::span<const ViewPairRecord> records, int per_bin, uint64_t seed) {
  if (per_bin < 1) {
    fail(ErrorCode::kInvalidArgument, "per_bin must be >= 1");
  }
  std::vector<std::vector<ViewPairRecord>> bins(3);
  for (const ViewPairRecord& rec : records) {
    auto bin = classify_overlap(rec.overlap);
    if (bin) bins[static_cast<int>(*bin)].push_back(rec);
  }
  std::vector<ViewPairRecord> out;
  for (int b = 0; b < 3; ++b) {
    auto& candidates = bins[b];
    CounterRng rng(seed, static_cast<uint64_t>(b));
    int take = std::min<int>(per_bin, static_cast<int>(candidates.size()));
    // Partial Fisher-Yates: the first `take` slots are a uniform sample
    // without replacement.
    for (int i = 0; i < take; ++i) {
      size_t j = i + rng.bounded(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
    }
    out.insert(out.end(), candidates.begin(), candidates.begin() + take);
  }
  return out;
}

std::vector<CovisiblePoint> covisible_points(const ScenePoints& points,
                                             const VisibleSet& source_visible,
                                             const VisibleSet& target_visible,
                                             const CameraPose& source_pose,
                                             const CameraPose& target_pose,
                                             const CameraIntrinsics& K) {
  std::vector<int> both;
  std::set_intersection(source_visible.begin(), source_visible.end(),
                        target_visible.begin(), target_visible.end(),
                        std::back_inserter(both));
  std::vector<CovisiblePoint> out;
  out.reserve(both.size());
  for (int idx : both) {
    Vec3 ps = source_pose.apply(points[idx]);
    Vec3 pt = target_pose.apply(points[idx]);
    CovisiblePoint cp;
    cp.point_index = idx;
    cp.source_px = project_point(ps, K);
    cp.target_px = project_point(pt, K);
    cp.source_depth = ps.z();
    cp.target_depth = pt.z();
    out.push_back(cp);
  }
  return out;
}

bool keypoint_pair_flips(const CovisiblePoint& a, const CovisiblePoint& b,
                         double tau) {
  double du_source = a.source_px.x() - b.source_px.x();
  double du_target = a.target_px.x() - b.target_px.x();
  return du_source * du_target < 0.0 && std::abs(du_target) >= tau;
}

std::optional<KeypointPair> select_keypoint_pair(
    std::span<const CovisiblePoint> candidates, double tau, uint64_t seed) {
  if (tau <= 0.0) {
    fail(ErrorCode::kInvalidArgument, "tau must be positive");
  }
  size_t n = candidates.size();
  if (n < 2) return std::nullopt;
  CounterRng rng(seed);
  size_t budget = 10 * n;
  for (size_t attempt = 0; attempt < budget; ++attempt) {
    size_t ia = rng.bounded(n);
    size_t ib = rng.bounded(n);
    if (ia == ib) continue;
    if (keypoint_pair_flips(candidates[ia], candidates[ib], tau)) {
      return KeypointPair{candidates[ia], candidates[ib]};
    }
  }
  return std::nullopt;
}

LeftRight geometry_oracle(const Vec2& a_source_px, const Vec2& b_source_px,
                          const DepthMap& source_depth,
                          const RigidTransform& source_to_target,
                          const CameraIntrinsics& K) {
  auto warp_u = [&](const Vec2& px) {
    float d = source_depth.at_nearest(px);
    if (!(d > 0.f)) {
      fail(ErrorCode::kInvalidDepthAtKeypoint,
           "keypoint has no valid source depth");
    }
    Vec3 p = unproject_pixel(px, d, K);
    Vec3 q = source_to_target.apply(p);
    if (!(q.z() > 0.0)) {
      fail(ErrorCode::kInvalidDepthAtKeypoint,
           "keypoint warps behind the target camera");
    }
    return project_point(q, K).x();
  };
  return warp_u(a_source_px) < warp_u(b_source_px) ? LeftRight::kLeft
                                                   : LeftRight::kRight;
}

LeftRight geometry_oracle(const KeypointPair& pair, const DepthMap& source_depth,
                          const RigidTransform& source_to_target,
                          const CameraIntrinsics& K) {
  return geometry_oracle(pair.a.source_px, pair.b.source_px, source_depth,
                         source_to_target, K);
}

}  // namespace tokenwarp
