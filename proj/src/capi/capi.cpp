#include "tokenwarp/tokenwarp.h"

#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "core/bvh.hpp"
#include "core/fetch.hpp"
#include "core/fetch_io.hpp"
#include "core/frame.hpp"
#include "core/geometry.hpp"
#include "core/image.hpp"
#include "core/io_png.hpp"
#include "core/jitter.hpp"
#include "core/markers.hpp"
#include "core/mesh.hpp"
#include "core/questions.hpp"
#include "core/synthetic.hpp"
#include "core/viewbench.hpp"
#include "core/vqa_io.hpp"
#include "core/warp.hpp"

namespace tw = tokenwarp;

/* ---- handle definitions -------------------------------------------------- */

struct tw_image {
  tw::Image value;
};

struct tw_depth {
  tw::DepthMap value;
};

struct tw_mesh {
  tw::ProxyMesh value;
  mutable std::unique_ptr<tw::MeshBvh> bvh;
  mutable std::once_flag bvh_once;

  const tw::MeshBvh& accel() const {
    std::call_once(bvh_once, [this] { bvh = std::make_unique<tw::MeshBvh>(value); });
    return *bvh;
  }
};

struct tw_warp_field {
  tw::WarpField value;
};

struct tw_fetch_map {
  tw::FetchMap value;
};

struct tw_patch_list {
  std::vector<std::optional<tw::Patch>> patches;
  uint32_t patch_size = 0;
};

struct tw_jitter_field {
  tw::JitterField value;
};

struct tw_scene {
  tw::SyntheticScene value;
};

struct tw_points {
  std::vector<tw::Vec3> value;
};

struct tw_index_set {
  std::vector<int32_t> value;
};

struct tw_covis_list {
  std::vector<tw::CovisiblePoint> value;
};

struct tw_vqa {
  tw::VqaInstance value;
};

struct tw_frame {
  tw_image image;
  tw_depth depth;
  tw::CameraPose pose;
  tw::CameraIntrinsics intrinsics;
};

/* ---- error plumbing ------------------------------------------------------- */

namespace {

thread_local std::string g_last_error;

tw_status map_code(tw::ErrorCode code) {
  using EC = tw::ErrorCode;
  switch (code) {
    case EC::kInvalidArgument: return TW_ERR_INVALID_ARGUMENT;
    case EC::kNonPositiveDepth: return TW_ERR_NON_POSITIVE_DEPTH;
    case EC::kInvalidDepth: return TW_ERR_INVALID_DEPTH;
    case EC::kIndivisibleResolution: return TW_ERR_INDIVISIBLE_RESOLUTION;
    case EC::kDimensionMismatch: return TW_ERR_DIMENSION_MISMATCH;
    case EC::kEmptyDepth: return TW_ERR_EMPTY_DEPTH;
    case EC::kDegenerateDirection: return TW_ERR_DEGENERATE_DIRECTION;
    case EC::kNegativeScale: return TW_ERR_NEGATIVE_SCALE;
    case EC::kInvalidDepthAtKeypoint: return TW_ERR_INVALID_DEPTH_AT_KEYPOINT;
    case EC::kMarkerOutOfBounds: return TW_ERR_MARKER_OUT_OF_BOUNDS;
    case EC::kNonPlanarScene: return TW_ERR_NON_PLANAR_SCENE;
    case EC::kNonRigidPose: return TW_ERR_NON_RIGID_POSE;
    case EC::kParseError: return TW_ERR_PARSE;
    case EC::kIoError: return TW_ERR_IO;
    case EC::kBadMagic: return TW_ERR_BAD_MAGIC;
    case EC::kUnsupportedVersion: return TW_ERR_UNSUPPORTED_VERSION;
    case EC::kTruncatedFile: return TW_ERR_TRUNCATED_FILE;
  }
  return TW_ERR_INTERNAL;
}

template <typename Fn>
tw_status guarded(Fn&& fn) {
  try {
    fn();
    return TW_OK;
  } catch (const tw::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TW_ERR_INTERNAL;
  }
}

tw_status bad_argument(const char* message) {
  g_last_error = message;
  return TW_ERR_INVALID_ARGUMENT;
}

/* ---- conversions ---------------------------------------------------------- */

tw::CameraIntrinsics to_core(const tw_intrinsics& k) {
  return {k.fx, k.fy, k.cx, k.cy, static_cast<int>(k.width),
          static_cast<int>(k.height)};
}

tw_intrinsics from_core(const tw::CameraIntrinsics& k) {
  return {k.fx, k.fy, k.cx, k.cy, static_cast<uint32_t>(k.width),
          static_cast<uint32_t>(k.height)};
}

tw::RigidTransform to_core(const tw_pose& p) {
  tw::Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = p.rotation[i * 3 + j];
  }
  return tw::RigidTransform(r, tw::Vec3(p.translation[0], p.translation[1],
                                        p.translation[2]));
}

tw_pose from_core(const tw::RigidTransform& t) {
  tw_pose p;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p.rotation[i * 3 + j] = t.rotation()(i, j);
    p.translation[i] = t.translation()(i);
  }
  return p;
}

tw::PatchGrid to_core(const tw_grid& g) {
  return tw::PatchGrid::create(static_cast<int>(g.rows * g.patch_size),
                               static_cast<int>(g.cols * g.patch_size),
                               static_cast<int>(g.patch_size));
}

tw_grid from_core(const tw::PatchGrid& g) {
  return {static_cast<uint32_t>(g.patch_size()),
          static_cast<uint32_t>(g.rows()), static_cast<uint32_t>(g.cols())};
}

tw::MarkerSpec to_core(const tw_marker& m) {
  tw::MarkerSpec spec;
  spec.kind = static_cast<tw::MarkerKind>(m.kind);
  spec.position = tw::Vec2(m.x, m.y);
  spec.size = m.size;
  spec.color = {m.color[0], m.color[1], m.color[2]};
  spec.letter = m.letter;
  return spec;
}

tw_marker from_core(const tw::MarkerSpec& spec) {
  tw_marker m;
  m.kind = static_cast<int32_t>(spec.kind);
  m.x = spec.position.x();
  m.y = spec.position.y();
  m.size = spec.size;
  m.color[0] = spec.color[0];
  m.color[1] = spec.color[1];
  m.color[2] = spec.color[2];
  m.letter = spec.letter;
  return m;
}

tw::CovisiblePoint to_core(const tw_covis_point& p) {
  tw::CovisiblePoint cp;
  cp.point_index = p.point_index;
  cp.source_px = tw::Vec2(p.src_x, p.src_y);
  cp.target_px = tw::Vec2(p.tgt_x, p.tgt_y);
  cp.source_depth = p.src_depth;
  cp.target_depth = p.tgt_depth;
  return cp;
}

tw_covis_point from_core(const tw::CovisiblePoint& cp) {
  return {cp.point_index, cp.source_px.x(), cp.source_px.y(), cp.source_depth,
          cp.target_px.x(), cp.target_px.y(), cp.target_depth};
}

tw::RelativePosePair rel_pair(const tw_pose& source, const tw_pose& target) {
  return tw::RelativePosePair::between(to_core(source), to_core(target));
}

tw::Rgb fill_color(const uint8_t fill[3]) {
  if (!fill) return {0, 0, 0};
  return {fill[0], fill[1], fill[2]};
}

tw_image* make_mask(const tw::WarpedImage& warped) {
  auto* mask = new tw_image;
  mask->value = tw::Image(warped.image.width(), warped.image.height());
  for (int y = 0; y < warped.image.height(); ++y) {
    for (int x = 0; x < warped.image.width(); ++x) {
      uint8_t v = warped.pixel_valid(x, y) ? 255 : 0;
      mask->value.set_pixel(x, y, {v, v, v});
    }
  }
  return mask;
}

}  // namespace

/* ---- common ---------------------------------------------------------------- */

const char* tw_status_name(tw_status status) {
  switch (status) {
    case TW_OK: return "ok";
    case TW_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case TW_ERR_NON_POSITIVE_DEPTH: return "non-positive-depth";
    case TW_ERR_INVALID_DEPTH: return "invalid-depth";
    case TW_ERR_INDIVISIBLE_RESOLUTION: return "indivisible-resolution";
    case TW_ERR_DIMENSION_MISMATCH: return "dimension-mismatch";
    case TW_ERR_EMPTY_DEPTH: return "empty-depth";
    case TW_ERR_DEGENERATE_DIRECTION: return "degenerate-direction";
    case TW_ERR_NEGATIVE_SCALE: return "negative-scale";
    case TW_ERR_INVALID_DEPTH_AT_KEYPOINT: return "invalid-depth-at-keypoint";
    case TW_ERR_MARKER_OUT_OF_BOUNDS: return "marker-out-of-bounds";
    case TW_ERR_NON_PLANAR_SCENE: return "non-planar-scene";
    case TW_ERR_NON_RIGID_POSE: return "non-rigid-pose";
    case TW_ERR_PARSE: return "parse-error";
    case TW_ERR_IO: return "io-error";
    case TW_ERR_BAD_MAGIC: return "bad-magic";
    case TW_ERR_UNSUPPORTED_VERSION: return "unsupported-version";
    case TW_ERR_TRUNCATED_FILE: return "truncated-file";
    case TW_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* tw_last_error(void) { return g_last_error.c_str(); }

/* ---- images ------------------------------------------------------------------ */

tw_status tw_image_create(uint32_t width, uint32_t height,
                          const uint8_t* rgb_or_null, tw_image** out) {
  if (!out) return bad_argument("out must not be null");
  return guarded([&] {
    auto handle = std::make_unique<tw_image>();
    if (rgb_or_null) {
      std::vector<uint8_t> data(rgb_or_null,
                                rgb_or_null + size_t(width) * height * 3);
      handle->value = tw::Image(static_cast<int>(width),
                                static_cast<int>(height), std::move(data));
    } else {
      handle->value = tw::Image(static_cast<int>(width), static_cast<int>(height));
    }
    *out = handle.release();
  });
}

tw_status tw_image_load_png(const char* path, tw_image** out) {
  if (!path || !out) return bad_argument("path and out must not be null");
  return guarded([&] {
    auto handle = std::make_unique<tw_image>();
    handle->value = tw::load_png_rgb(path);
    *out = handle.release();
  });
}

tw_status tw_image_save_png(const tw_image* image, const char* path) {
  if (!image || !path) return bad_argument("image and path must not be null");
  return guarded([&] { tw::save_png_rgb(image->value, path); });
}

void tw_image_free(tw_image* image) { delete image; }

uint32_t tw_image_width(const tw_image* image) {
  return image ? static_cast<uint32_t>(image->value.width()) : 0;
}

uint32_t tw_image_height(const tw_image* image) {
  return image ? static_cast<uint32_t>(image->value.height()) : 0;
}

const uint8_t* tw_image_pixels(const tw_image* image) {
  return image ? image->value.data().data() : nullptr;
}

/* ---- depth ------------------------------------------------------------------- */

tw_status tw_depth_create(uint32_t width, uint32_t height, const float* meters,
                          tw_depth** out) {
  if (!out || !meters) return bad_argument("meters and out must not be null");
  return guarded([&] {
    std::vector<float> values(meters, meters + size_t(width) * height);
    auto handle = std::make_unique<tw_depth>();
    handle->value = tw::DepthMap(static_cast<int>(width),
                                 static_cast<int>(height), std::move(values));
    *out = handle.release();
  });
}

tw_status tw_depth_load(const char* path, double depth_scale, tw_depth** out) {
  if (!path || !out) return bad_argument("path and out must not be null");
  return guarded([&] {
    auto handle = std::make_unique<tw_depth>();
    handle->value = tw::load_depth_file(path, depth_scale);
    *out = handle.release();
  });
}

tw_status tw_depth_save_png16(const tw_depth* depth, double depth_scale,
                              const char* path) {
  if (!depth || !path) return bad_argument("depth and path must not be null");
  return guarded([&] { tw::save_depth_png16(depth->value, depth_scale, path); });
}

tw_status tw_depth_save_pfm(const tw_depth* depth, const char* path) {
  if (!depth || !path) return bad_argument("depth and path must not be null");
  return guarded([&] { tw::save_pfm(depth->value, path); });
}

void tw_depth_free(tw_depth* depth) { delete depth; }

uint32_t tw_depth_width(const tw_depth* depth) {
  return depth ? static_cast<uint32_t>(depth->value.width()) : 0;
}

uint32_t tw_depth_height(const tw_depth* depth) {
  return depth ? static_cast<uint32_t>(depth->value.height()) : 0;
}

const float* tw_depth_values(const tw_depth* depth) {
  return depth ? depth->value.values().data() : nullptr;
}

/* ---- poses / intrinsics / grids ------------------------------------------------ */

void tw_pose_identity(tw_pose* out) {
  if (!out) return;
  *out = from_core(tw::RigidTransform::identity());
}

tw_status tw_pose_load(const char* path, tw_pose_convention convention,
                       tw_pose* out) {
  if (!path || !out) return bad_argument("path and out must not be null");
  return guarded([&] {
    *out = from_core(tw::load_pose_text(
        path, convention == TW_POSE_CAMERA_TO_WORLD
                  ? tw::PoseConvention::kCameraToWorld
                  : tw::PoseConvention::kWorldToCamera));
  });
}

tw_status tw_pose_save(const tw_pose* pose, tw_pose_convention convention,
                       const char* path) {
  if (!pose || !path) return bad_argument("pose and path must not be null");
  return guarded([&] {
    tw::save_pose_text(to_core(*pose),
                       convention == TW_POSE_CAMERA_TO_WORLD
                           ? tw::PoseConvention::kCameraToWorld
                           : tw::PoseConvention::kWorldToCamera,
                       path);
  });
}

tw_status tw_pose_inverse(const tw_pose* pose, tw_pose* out) {
  if (!pose || !out) return bad_argument("pose and out must not be null");
  return guarded([&] { *out = from_core(to_core(*pose).inverse()); });
}

tw_status tw_pose_relative(const tw_pose* source, const tw_pose* target,
                           tw_direction direction, tw_pose* out) {
  if (!source || !target || !out) {
    return bad_argument("source, target and out must not be null");
  }
  return guarded([&] {
    tw::RelativePose rel = tw::relative_pose(
        to_core(*source), to_core(*target),
        direction == TW_TARGET_TO_SOURCE ? tw::PoseDirection::kTargetToSource
                                         : tw::PoseDirection::kSourceToTarget);
    *out = from_core(rel.transform);
  });
}

tw_status tw_pose_apply(const tw_pose* pose, const double point[3],
                        double out[3]) {
  if (!pose || !point || !out) {
    return bad_argument("pose, point and out must not be null");
  }
  return guarded([&] {
    tw::Vec3 p = to_core(*pose).apply(tw::Vec3(point[0], point[1], point[2]));
    out[0] = p.x();
    out[1] = p.y();
    out[2] = p.z();
  });
}

tw_status tw_intrinsics_load(const char* path, uint32_t width, uint32_t height,
                             tw_intrinsics* out) {
  if (!path || !out) return bad_argument("path and out must not be null");
  return guarded([&] {
    tw::IntrinsicsParams p = tw::load_intrinsics_text(path);
    tw::CameraIntrinsics k{p.fx, p.fy, p.cx, p.cy, static_cast<int>(width),
                           static_cast<int>(height)};
    k.validate();
    *out = from_core(k);
  });
}

tw_status tw_intrinsics_save(const tw_intrinsics* intrinsics, const char* path) {
  if (!intrinsics || !path) {
    return bad_argument("intrinsics and path must not be null");
  }
  return guarded([&] { tw::save_intrinsics_text(to_core(*intrinsics), path); });
}

tw_status tw_project_point(const tw_intrinsics* intrinsics,
                           const double point[3], double out[2]) {
  if (!intrinsics || !point || !out) {
    return bad_argument("intrinsics, point and out must not be null");
  }
  return guarded([&] {
    tw::Vec2 uv = tw::project_point(tw::Vec3(point[0], point[1], point[2]),
                                    to_core(*intrinsics));
    out[0] = uv.x();
    out[1] = uv.y();
  });
}

tw_status tw_unproject_pixel(const tw_intrinsics* intrinsics,
                             const double pixel[2], double depth,
                             double out[3]) {
  if (!intrinsics || !pixel || !out) {
    return bad_argument("intrinsics, pixel and out must not be null");
  }
  return guarded([&] {
    tw::Vec3 p = tw::unproject_pixel(tw::Vec2(pixel[0], pixel[1]), depth,
                                     to_core(*intrinsics));
    out[0] = p.x();
    out[1] = p.y();
    out[2] = p.z();
  });
}

tw_status tw_grid_make(uint32_t image_height, uint32_t image_width,
                       uint32_t patch_size, tw_grid* out) {
  if (!out) return bad_argument("out must not be null");
  return guarded([&] {
    *out = from_core(tw::PatchGrid::create(static_cast<int>(image_height),
                                           static_cast<int>(image_width),
                                           static_cast<int>(patch_size)));
  });
}

tw_status tw_grid_center(const tw_grid* grid, uint32_t index, double out[2]) {
  if (!grid || !out) return bad_argument("grid and out must not be null");
  return guarded([&] {
    tw::PatchGrid g = to_core(*grid);
    if (index >= static_cast<uint32_t>(g.cell_count())) {
      tw::fail(tw::ErrorCode::kInvalidArgument, "grid index out of range");
    }
    tw::Vec2 c = g.center(static_cast<int>(index));
    out[0] = c.x();
    out[1] = c.y();
  });
}

/* ---- mesh ----------------------------------------------------------------------- */

tw_status tw_mesh_build(const tw_depth* depth, const tw_intrinsics* intrinsics,
                        double depth_ratio_cull, tw_mesh** out) {
  if (!depth || !intrinsics || !out) {
    return bad_argument("depth, intrinsics and out must not be null");
  }
  return guarded([&] {
    auto handle = std::make_unique<tw_mesh>();
    handle->value = tw::build_mesh(depth->value, to_core(*intrinsics),
                                   {depth_ratio_cull});
    *out = handle.release();
  });
}

tw_status tw_mesh_transform(const tw_mesh* mesh, const tw_pose* transform,
                            tw_mesh** out) {
  if (!mesh || !transform || !out) {
    return bad_argument("mesh, transform and out must not be null");
  }
  return guarded([&] {
    auto handle = std::make_unique<tw_mesh>();
    handle->value = tw::transform_mesh(mesh->value, to_core(*transform));
    *out = handle.release();
  });
}

void tw_mesh_free(tw_mesh* mesh) { delete mesh; }

size_t tw_mesh_vertex_count(const tw_mesh* mesh) {
  return mesh ? mesh->value.vertex_count() : 0;
}

size_t tw_mesh_triangle_count(const tw_mesh* mesh) {
  return mesh ? mesh->value.triangle_count() : 0;
}

tw_status tw_mesh_cast_ray(const tw_mesh* mesh, const double origin[3],
                           const double direction[3], tw_ray_hit* out,
                           int32_t* out_has_hit) {
  if (!mesh || !origin || !direction || !out || !out_has_hit) {
    return bad_argument("all arguments must be non-null");
  }
  return guarded([&] {
    auto hit = mesh->accel().cast_ray(
        tw::Vec3(origin[0], origin[1], origin[2]),
        tw::Vec3(direction[0], direction[1], direction[2]));
    *out_has_hit = hit ? 1 : 0;
    if (hit) {
      out->t = hit->t;
      for (int i = 0; i < 3; ++i) {
        out->point[i] = hit->point(i);
        out->barycentric[i] = hit->barycentric(i);
      }
      out->triangle = hit->triangle;
    }
  });
}

/* ---- warping ---------------------------------------------------------------------- */

tw_status tw_backward_warp_grid(const tw_mesh* source_mesh,
                                const tw_grid* target_grid,
                                const tw_pose* source_pose,
                                const tw_pose* target_pose,
                                const tw_intrinsics* intrinsics,
                                tw_warp_field** out) {
  if (!source_mesh || !target_grid || !source_pose || !target_pose ||
      !intrinsics || !out) {
    return bad_argument("all arguments must be non-null");
  }
  return guarded([&] {
    auto field = tw::backward_warp_grid(to_core(*target_grid),
                                        source_mesh->value,
                                        rel_pair(*source_pose, *target_pose),
                                        to_core(*intrinsics));
    *out = new tw_warp_field{std::move(field)};
  });
}

tw_status tw_forward_warp_grid(const tw_depth* source_depth,
                               const tw_grid* source_grid,
                               const tw_pose* source_pose,
                               const tw_pose* target_pose,
                               const tw_intrinsics* intrinsics,
                               tw_warp_field** out) {
  if (!source_depth || !source_grid || !source_pose || !target_pose ||
      !intrinsics || !out) {
    return bad_argument("all arguments must be non-null");
  }
  return guarded([&] {
    auto field = tw::forward_warp_grid(to_core(*source_grid),
                                       source_depth->value,
                                       rel_pair(*source_pose, *target_pose),
                                       to_core(*intrinsics));
    *out = new tw_warp_field{std::move(field)};
  });
}

void tw_warp_field_free(tw_warp_field* field) { delete field; }

uint32_t tw_warp_field_size(const tw_warp_field* field) {
  return field ? static_cast<uint32_t>(field->value.size()) : 0;
}

tw_status tw_warp_field_entry(const tw_warp_field* field, uint32_t index,
                              tw_warp_entry* out) {
  if (!field || !out) return bad_argument("field and out must not be null");
  if (index >= static_cast<uint32_t>(field->value.size())) {
    return bad_argument("warp field index out of range");
  }
  const tw::WarpEntry& e = field->value.entry(static_cast<int>(index));
  out->valid = e.valid ? 1 : 0;
  out->x = e.coord.x();
  out->y = e.coord.y();
  return TW_OK;
}

tw_status tw_pixel_backward_warp(const tw_image* source,
                                 const tw_depth* source_depth,
                                 const tw_pose* source_pose,
                                 const tw_pose* target_pose,
                                 const tw_intrinsics* intrinsics,
                                 const uint8_t fill[3], tw_image** out_image,
                                 tw_image** out_mask) {
  if (!source || !source_depth || !source_pose || !target_pose || !intrinsics ||
      !out_image) {
    return bad_argument("required arguments must be non-null");
  }
  return guarded([&] {
    tw::ProxyMesh mesh = tw::build_mesh(source_depth->value, to_core(*intrinsics));
    tw::PixelWarpOptions options;
    options.fill = fill_color(fill);
    tw::WarpedImage warped = tw::pixel_backward_warp_image(
        source->value, mesh, rel_pair(*source_pose, *target_pose),
        to_core(*intrinsics), options);
    if (out_mask) *out_mask = make_mask(warped);
    *out_image = new tw_image{std::move(warped.image)};
  });
}

tw_status tw_pixel_forward_warp(const tw_image* source,
                                const tw_depth* source_depth,
                                const tw_pose* source_pose,
                                const tw_pose* target_pose,
                                const tw_intrinsics* intrinsics,
                                const uint8_t fill[3], tw_image** out_image,
                                tw_image** out_mask) {
  if (!source || !source_depth || !source_pose || !target_pose || !intrinsics ||
      !out_image) {
    return bad_argument("required arguments must be non-null");
  }
  return guarded([&] {
    tw::PixelWarpOptions options;
    options.fill = fill_color(fill);
    tw::WarpedImage warped = tw::pixel_forward_warp_image(
        source->value, source_depth->value,
        rel_pair(*source_pose, *target_pose), to_core(*intrinsics), options);
    if (out_mask) *out_mask = make_mask(warped);
    *out_image = new tw_image{std::move(warped.image)};
  });
}

/* ---- fetching ---------------------------------------------------------------------- */

tw_status tw_nearest_fetch(const tw_warp_field* field, const tw_grid* source_grid,
                           tw_fetch_map** out) {
  if (!field || !source_grid || !out) {
    return bad_argument("field, source_grid and out must not be null");
  }
  return guarded([&] {
    auto map = tw::nearest_fetch(field->value, to_core(*source_grid));
    *out = new tw_fetch_map{std::move(map)};
  });
}

tw_status tw_adaptive_fetch(const tw_warp_field* field, const tw_image* source,
                            uint32_t patch_size, tw_fetch_map** out_map,
                            tw_patch_list** out_patches) {
  if (!field || !source || !out_map) {
    return bad_argument("field, source and out_map must not be null");
  }
  return guarded([&] {
    auto result = tw::adaptive_fetch(field->value, source->value,
                                     static_cast<int>(patch_size));
    if (out_patches) {
      *out_patches = new tw_patch_list{std::move(result.patches), patch_size};
    }
    *out_map = new tw_fetch_map{std::move(result.map)};
  });
}

tw_status tw_forward_positions_map(const tw_warp_field* field,
                                   const tw_grid* source_grid,
                                   tw_fetch_map** out) {
  if (!field || !source_grid || !out) {
    return bad_argument("field, source_grid and out must not be null");
  }
  return guarded([&] {
    auto map = tw::forward_positions_map(field->value, to_core(*source_grid));
    *out = new tw_fetch_map{std::move(map)};
  });
}

void tw_fetch_map_free(tw_fetch_map* map) { delete map; }

tw_fetch_mode tw_fetch_map_mode(const tw_fetch_map* map) {
  return map ? static_cast<tw_fetch_mode>(map->value.mode()) : TW_FETCH_NEAREST;
}

tw_status tw_fetch_map_grid(const tw_fetch_map* map, tw_grid* out) {
  if (!map || !out) return bad_argument("map and out must not be null");
  *out = from_core(map->value.grid());
  return TW_OK;
}

uint32_t tw_fetch_map_size(const tw_fetch_map* map) {
  return map ? static_cast<uint32_t>(map->value.size()) : 0;
}

tw_status tw_fetch_map_entry(const tw_fetch_map* map, uint32_t index,
                             tw_fetch_entry* out) {
  if (!map || !out) return bad_argument("map and out must not be null");
  if (index >= static_cast<uint32_t>(map->value.size())) {
    return bad_argument("fetch map index out of range");
  }
  const tw::FetchEntry& e = map->value.entry(static_cast<int>(index));
  out->valid = e.valid ? 1 : 0;
  out->src_x = e.src_x;
  out->src_y = e.src_y;
  out->nearest_index = e.nearest_index;
  return TW_OK;
}

tw_status tw_fetch_map_write(const tw_fetch_map* map, const char* path,
                             int32_t emit_json) {
  if (!map || !path) return bad_argument("map and path must not be null");
  return guarded([&] { tw::write_fetch_map(map->value, path, emit_json != 0); });
}

tw_status tw_fetch_map_read(const char* path, tw_fetch_map** out) {
  if (!path || !out) return bad_argument("path and out must not be null");
  return guarded([&] {
    auto map = tw::read_fetch_map(path);
    *out = new tw_fetch_map{std::move(map)};
  });
}

tw_status tw_extract_fixed_patches(const tw_image* image, const tw_grid* grid,
                                   tw_patch_list** out) {
  if (!image || !grid || !out) {
    return bad_argument("image, grid and out must not be null");
  }
  return guarded([&] {
    auto patches = tw::extract_fixed_patches(image->value, to_core(*grid));
    auto handle = std::make_unique<tw_patch_list>();
    handle->patch_size = grid->patch_size;
    handle->patches.reserve(patches.size());
    for (auto& p : patches) handle->patches.emplace_back(std::move(p));
    *out = handle.release();
  });
}

void tw_patch_list_free(tw_patch_list* patches) { delete patches; }

uint32_t tw_patch_list_count(const tw_patch_list* patches) {
  return patches ? static_cast<uint32_t>(patches->patches.size()) : 0;
}

uint32_t tw_patch_list_patch_size(const tw_patch_list* patches) {
  return patches ? patches->patch_size : 0;
}

int32_t tw_patch_list_has(const tw_patch_list* patches, uint32_t index) {
  if (!patches || index >= patches->patches.size()) return 0;
  return patches->patches[index].has_value() ? 1 : 0;
}

const uint8_t* tw_patch_list_pixels(const tw_patch_list* patches,
                                    uint32_t index) {
  if (!patches || index >= patches->patches.size() ||
      !patches->patches[index]) {
    return nullptr;
  }
  return patches->patches[index]->rgb.data();
}

tw_status tw_patch_list_center(const tw_patch_list* patches, uint32_t index,
                               double out[2]) {
  if (!patches || !out) return bad_argument("patches and out must not be null");
  if (index >= patches->patches.size() || !patches->patches[index]) {
    return bad_argument("patch index out of range or empty");
  }
  out[0] = patches->patches[index]->center.x();
  out[1] = patches->patches[index]->center.y();
  return TW_OK;
}

tw_status tw_patch_list_assemble(const tw_patch_list* patches,
                                 const tw_grid* grid, const uint8_t fill[3],
                                 tw_image** out) {
  if (!patches || !grid || !out) {
    return bad_argument("patches, grid and out must not be null");
  }
  return guarded([&] {
    auto image = tw::assemble_patches(patches->patches, to_core(*grid),
                                      fill_color(fill));
    *out = new tw_image{std::move(image)};
  });
}

/* ---- jitter ------------------------------------------------------------------------- */

tw_status tw_gen_jitter_field(const tw_grid* grid, double max_displacement,
                              uint32_t neighborhood, uint64_t seed,
                              tw_jitter_field** out) {
  if (!grid || !out) return bad_argument("grid and out must not be null");
  return guarded([&] {
    auto field = tw::gen_jitter_field(to_core(*grid), max_displacement,
                                      static_cast<int>(neighborhood), seed);
    *out = new tw_jitter_field{std::move(field)};
  });
}

void tw_jitter_field_free(tw_jitter_field* field) { delete field; }

tw_status tw_jitter_field_get(const tw_jitter_field* field, uint32_t index,
                              double out[2]) {
  if (!field || !out) return bad_argument("field and out must not be null");
  if (index >= static_cast<uint32_t>(field->value.size())) {
    return bad_argument("jitter field index out of range");
  }
  const tw::Vec2& d = field->value.displacement(static_cast<int>(index));
  out[0] = d.x();
  out[1] = d.y();
  return TW_OK;
}

tw_status tw_apply_jitter(const tw_grid* grid, const tw_jitter_field* field,
                          const tw_image* image, uint32_t patch_size,
                          tw_jitter_mode mode, uint64_t pixel_noise_seed,
                          tw_patch_list** out) {
  if (!grid || !field || !image || !out) {
    return bad_argument("grid, field, image and out must not be null");
  }
  return guarded([&] {
    auto patches = tw::apply_jitter(
        to_core(*grid), field->value, image->value,
        static_cast<int>(patch_size),
        mode == TW_JITTER_PIXEL_BASELINE ? tw::JitterMode::kPixelBaseline
                                         : tw::JitterMode::kToken,
        pixel_noise_seed);
    auto handle = std::make_unique<tw_patch_list>();
    handle->patch_size = patch_size;
    handle->patches.reserve(patches.size());
    for (auto& p : patches) handle->patches.emplace_back(std::move(p));
    *out = handle.release();
  });
}

/* ---- synthetic scenes ------------------------------------------------------------------ */

tw_status tw_scene_plane(const tw_intrinsics* intrinsics, double z,
                         uint32_t checker_period, const tw_pose* target_pose,
                         tw_scene** out) {
  if (!intrinsics || !target_pose || !out) {
    return bad_argument("intrinsics, target_pose and out must not be null");
  }
  return guarded([&] {
    tw::CheckerParams texture;
    texture.period = static_cast<int>(checker_period);
    auto scene = tw::gen_plane_scene(to_core(*intrinsics), z, texture,
                                     to_core(*target_pose));
    *out = new tw_scene{std::move(scene)};
  });
}

tw_status tw_scene_two_plane(const tw_intrinsics* intrinsics, double z_near,
                             double z_far, uint32_t split_col,
                             uint32_t checker_period, const tw_pose* target_pose,
                             tw_scene** out) {
  if (!intrinsics || !target_pose || !out) {
    return bad_argument("intrinsics, target_pose and out must not be null");
  }
  return guarded([&] {
    tw::CheckerParams texture;
    texture.period = static_cast<int>(checker_period);
    auto scene = tw::gen_two_plane_scene(to_core(*intrinsics), z_near, z_far,
                                         static_cast<int>(split_col), texture,
                                         to_core(*target_pose));
    *out = new tw_scene{std::move(scene)};
  });
}

void tw_scene_free(tw_scene* scene) { delete scene; }

tw_status tw_scene_image(const tw_scene* scene, tw_image** out) {
  if (!scene || !out) return bad_argument("scene and out must not be null");
  *out = new tw_image{scene->value.image};
  return TW_OK;
}

tw_status tw_scene_depth(const tw_scene* scene, tw_depth** out) {
  if (!scene || !out) return bad_argument("scene and out must not be null");
  *out = new tw_depth{scene->value.depth};
  return TW_OK;
}

tw_status tw_scene_target_image(const tw_scene* scene, tw_image** out) {
  if (!scene || !out) return bad_argument("scene and out must not be null");
  return guarded([&] {
    *out = new tw_image{tw::render_target_view(scene->value)};
  });
}

tw_status tw_scene_target_depth(const tw_scene* scene, tw_depth** out) {
  if (!scene || !out) return bad_argument("scene and out must not be null");
  return guarded([&] {
    *out = new tw_depth{tw::render_target_depth(scene->value)};
  });
}

tw_status tw_scene_poses(const tw_scene* scene, tw_pose* out_source,
                         tw_pose* out_target) {
  if (!scene || !out_source || !out_target) {
    return bad_argument("scene and out poses must not be null");
  }
  *out_source = from_core(scene->value.source_pose);
  *out_target = from_core(scene->value.target_pose);
  return TW_OK;
}

tw_status tw_scene_intrinsics(const tw_scene* scene, tw_intrinsics* out) {
  if (!scene || !out) return bad_argument("scene and out must not be null");
  *out = from_core(scene->value.intrinsics);
  return TW_OK;
}

tw_status tw_scene_oracle(const tw_scene* scene, const double target_xy[2],
                          double out_source_xy[2], int32_t* out_valid) {
  if (!scene || !target_xy || !out_source_xy || !out_valid) {
    return bad_argument("all arguments must be non-null");
  }
  return guarded([&] {
    auto src = tw::analytic_backward_oracle(scene->value,
                                            tw::Vec2(target_xy[0], target_xy[1]));
    *out_valid = src ? 1 : 0;
    if (src) {
      out_source_xy[0] = src->x();
      out_source_xy[1] = src->y();
    }
  });
}

/* ---- overlap / benchmark ------------------------------------------------------------------ */

tw_status tw_points_create(const double* xyz, size_t count, tw_points** out) {
  if (!xyz || !out) return bad_argument("xyz and out must not be null");
  return guarded([&] {
    auto handle = std::make_unique<tw_points>();
    handle->value.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      handle->value.emplace_back(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
    }
    *out = handle.release();
  });
}

tw_status tw_points_load(const char* path, tw_points** out) {
  if (!path || !out) return bad_argument("path and out must not be null");
  return guarded([&] {
    auto handle = std::make_unique<tw_points>();
    handle->value = tw::load_points_text(path);
    *out = handle.release();
  });
}

tw_status tw_points_save(const tw_points* points, const char* path) {
  if (!points || !path) return bad_argument("points and path must not be null");
  return guarded([&] { tw::save_points_text(points->value, path); });
}

void tw_points_free(tw_points* points) { delete points; }

size_t tw_points_count(const tw_points* points) {
  return points ? points->value.size() : 0;
}

tw_status tw_points_get(const tw_points* points, size_t index, double out[3]) {
  if (!points || !out) return bad_argument("points and out must not be null");
  if (index >= points->value.size()) {
    return bad_argument("point index out of range");
  }
  out[0] = points->value[index].x();
  out[1] = points->value[index].y();
  out[2] = points->value[index].z();
  return TW_OK;
}

tw_status tw_visible_set(const tw_points* points, const tw_pose* pose,
                         const tw_intrinsics* intrinsics, const tw_depth* depth,
                         double occlusion_tolerance, tw_index_set** out) {
  if (!points || !pose || !intrinsics || !depth || !out) {
    return bad_argument("all arguments must be non-null");
  }
  return guarded([&] {
    auto set = tw::visible_set(points->value, to_core(*pose),
                               to_core(*intrinsics), depth->value,
                               occlusion_tolerance);
    auto handle = std::make_unique<tw_index_set>();
    handle->value.assign(set.begin(), set.end());
    *out = handle.release();
  });
}

void tw_index_set_free(tw_index_set* set) { delete set; }

size_t tw_index_set_count(const tw_index_set* set) {
  return set ? set->value.size() : 0;
}

const int32_t* tw_index_set_data(const tw_index_set* set) {
  return set ? set->value.data() : nullptr;
}

double tw_overlap_ratio(const tw_index_set* a, const tw_index_set* b) {
  if (!a || !b) return 0.0;
  tw::VisibleSet va(a->value.begin(), a->value.end());
  tw::VisibleSet vb(b->value.begin(), b->value.end());
  return tw::overlap_ratio(va, vb);
}

int32_t tw_overlap_bin(double ratio) {
  auto bin = tw::classify_overlap(ratio);
  return bin ? static_cast<int32_t>(*bin) : -1;
}

const char* tw_overlap_bin_label(int32_t bin) {
  if (bin < 0 || bin > 2) return "";
  return tw::overlap_bin_name(static_cast<tw::OverlapBin>(bin));
}

tw_status tw_bin_and_sample_pairs(const tw_pair_record* records, size_t count,
                                  uint32_t per_bin, uint64_t seed,
                                  tw_pair_record* out, size_t* out_count) {
  if ((!records && count > 0) || !out || !out_count) {
    return bad_argument("records, out and out_count must not be null");
  }
  return guarded([&] {
    std::vector<tw::ViewPairRecord> input;
    input.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      input.push_back({std::to_string(records[i].source_frame),
                       std::to_string(records[i].target_frame),
                       records[i].overlap});
    }
    auto sampled = tw::bin_and_sample_pairs(input, static_cast<int>(per_bin),
                                            seed);
    for (size_t i = 0; i < sampled.size(); ++i) {
      out[i] = {std::stoi(sampled[i].source_frame),
                std::stoi(sampled[i].target_frame), sampled[i].overlap};
    }
    *out_count = sampled.size();
  });
}

tw_status tw_covisible_points(const tw_points* points,
                              const tw_index_set* source_visible,
                              const tw_index_set* target_visible,
                              const tw_pose* source_pose,
                              const tw_pose* target_pose,
                              const tw_intrinsics* intrinsics,
                              tw_covis_list** out) {
  if (!points || !source_visible || !target_visible || !source_pose ||
      !target_pose || !intrinsics || !out) {
    return bad_argument("all arguments must be non-null");
  }
  return guarded([&] {
    tw::VisibleSet vs(source_visible->value.begin(), source_visible->value.end());
    tw::VisibleSet vt(target_visible->value.begin(), target_visible->value.end());
    auto list = tw::covisible_points(points->value, vs, vt, to_core(*source_pose),
                                     to_core(*target_pose), to_core(*intrinsics));
    *out = new tw_covis_list{std::move(list)};
  });
}

void tw_covis_list_free(tw_covis_list* list) { delete list; }

size_t tw_covis_list_count(const tw_covis_list* list) {
  return list ? list->value.size() : 0;
}

tw_status tw_covis_list_get(const tw_covis_list* list, size_t index,
                            tw_covis_point* out) {
  if (!list || !out) return bad_argument("list and out must not be null");
  if (index >= list->value.size()) {
    return bad_argument("covisible point index out of range");
  }
  *out = from_core(list->value[index]);
  return TW_OK;
}

tw_status tw_select_keypoint_pair(const tw_covis_list* candidates, double tau,
                                  uint64_t seed, tw_keypoint_pair* out,
                                  int32_t* out_found) {
  if (!candidates || !out || !out_found) {
    return bad_argument("candidates, out and out_found must not be null");
  }
  return guarded([&] {
    auto pair = tw::select_keypoint_pair(candidates->value, tau, seed);
    *out_found = pair ? 1 : 0;
    if (pair) {
      out->a = from_core(pair->a);
      out->b = from_core(pair->b);
    }
  });
}

tw_status tw_geometry_oracle(const tw_keypoint_pair* pair,
                             const tw_depth* source_depth,
                             const tw_pose* source_pose,
                             const tw_pose* target_pose,
                             const tw_intrinsics* intrinsics,
                             int32_t* out_left) {
  if (!pair || !source_depth || !source_pose || !target_pose || !intrinsics ||
      !out_left) {
    return bad_argument("all arguments must be non-null");
  }
  double a[2] = {pair->a.src_x, pair->a.src_y};
  double b[2] = {pair->b.src_x, pair->b.src_y};
  return tw_geometry_oracle_points(a, b, source_depth, source_pose, target_pose,
                                   intrinsics, out_left);
}

tw_status tw_geometry_oracle_points(const double a_source_xy[2],
                                    const double b_source_xy[2],
                                    const tw_depth* source_depth,
                                    const tw_pose* source_pose,
                                    const tw_pose* target_pose,
                                    const tw_intrinsics* intrinsics,
                                    int32_t* out_left) {
  if (!a_source_xy || !b_source_xy || !source_depth || !source_pose ||
      !target_pose || !intrinsics || !out_left) {
    return bad_argument("all arguments must be non-null");
  }
  return guarded([&] {
    auto rel = rel_pair(*source_pose, *target_pose);
    auto side = tw::geometry_oracle(
        tw::Vec2(a_source_xy[0], a_source_xy[1]),
        tw::Vec2(b_source_xy[0], b_source_xy[1]), source_depth->value,
        rel.source_to_target, to_core(*intrinsics));
    *out_left = side == tw::LeftRight::kLeft ? 1 : 0;
  });
}

tw_status tw_render_markers(const tw_image* image, const tw_marker* markers,
                            size_t count, tw_image** out) {
  if (!image || (!markers && count > 0) || !out) {
    return bad_argument("image, markers and out must not be null");
  }
  return guarded([&] {
    std::vector<tw::MarkerSpec> specs;
    specs.reserve(count);
    for (size_t i = 0; i < count; ++i) specs.push_back(to_core(markers[i]));
    auto rendered = tw::render_markers(image->value, specs);
    *out = new tw_image{std::move(rendered)};
  });
}

tw_status tw_gen_question(const tw_keypoint_pair* pair, tw_task_kind task,
                          uint64_t seed, tw_vqa** out) {
  if (!pair || !out) return bad_argument("pair and out must not be null");
  return guarded([&] {
    tw::KeypointPair kp{to_core(pair->a), to_core(pair->b)};
    auto vqa = tw::gen_question(kp, static_cast<tw::TaskKind>(task), seed);
    *out = new tw_vqa{std::move(vqa)};
  });
}

void tw_vqa_free(tw_vqa* vqa) { delete vqa; }

const char* tw_vqa_question(const tw_vqa* vqa) {
  return vqa ? vqa->value.question.c_str() : "";
}

const char* tw_vqa_answer(const tw_vqa* vqa) {
  return vqa ? vqa->value.answer.c_str() : "";
}

uint32_t tw_vqa_marker_count(const tw_vqa* vqa) {
  return vqa ? static_cast<uint32_t>(vqa->value.markers.size()) : 0;
}

tw_status tw_vqa_marker(const tw_vqa* vqa, uint32_t index, int32_t view,
                        tw_marker* out) {
  if (!vqa || !out) return bad_argument("vqa and out must not be null");
  const auto& list = view == 0 ? vqa->value.markers : vqa->value.target_markers;
  if (index >= list.size()) return bad_argument("marker index out of range");
  *out = from_core(list[index]);
  return TW_OK;
}

tw_status tw_vqa_set_frames(tw_vqa* vqa, const char* source_frame,
                            const char* target_frame, const char* overlap_bin) {
  if (!vqa) return bad_argument("vqa must not be null");
  if (source_frame) vqa->value.source_frame = source_frame;
  if (target_frame) vqa->value.target_frame = target_frame;
  if (overlap_bin) vqa->value.overlap_bin = overlap_bin;
  return TW_OK;
}

tw_status tw_vqa_write_json(const tw_vqa* const* instances, size_t count,
                            const char* path) {
  if ((!instances && count > 0) || !path) {
    return bad_argument("instances and path must not be null");
  }
  return guarded([&] {
    std::vector<tw::VqaInstance> list;
    list.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!instances[i]) {
        tw::fail(tw::ErrorCode::kInvalidArgument, "null vqa instance");
      }
      list.push_back(instances[i]->value);
    }
    tw::write_vqa_json(list, path);
  });
}

/* ---- frames --------------------------------------------------------------------------------- */

tw_status tw_frame_load(const char* image_path, const char* depth_path,
                        const char* pose_path, const char* intrinsics_path,
                        tw_pose_convention convention, double depth_scale,
                        tw_frame** out) {
  if (!image_path || !depth_path || !pose_path || !intrinsics_path || !out) {
    return bad_argument("all paths and out must not be null");
  }
  return guarded([&] {
    tw::FramePaths paths{"", image_path, depth_path, pose_path, intrinsics_path};
    auto bundle = tw::load_frame(paths,
                                 convention == TW_POSE_CAMERA_TO_WORLD
                                     ? tw::PoseConvention::kCameraToWorld
                                     : tw::PoseConvention::kWorldToCamera,
                                 depth_scale);
    auto handle = std::make_unique<tw_frame>();
    handle->image.value = std::move(bundle.image);
    handle->depth.value = std::move(bundle.depth);
    handle->pose = bundle.pose;
    handle->intrinsics = bundle.intrinsics;
    *out = handle.release();
  });
}

void tw_frame_free(tw_frame* frame) { delete frame; }

const tw_image* tw_frame_image(const tw_frame* frame) {
  return frame ? &frame->image : nullptr;
}

const tw_depth* tw_frame_depth(const tw_frame* frame) {
  return frame ? &frame->depth : nullptr;
}

tw_status tw_frame_pose(const tw_frame* frame, tw_pose* out) {
  if (!frame || !out) return bad_argument("frame and out must not be null");
  *out = from_core(frame->pose);
  return TW_OK;
}

tw_status tw_frame_intrinsics(const tw_frame* frame, tw_intrinsics* out) {
  if (!frame || !out) return bad_argument("frame and out must not be null");
  *out = from_core(frame->intrinsics);
  return TW_OK;
}
