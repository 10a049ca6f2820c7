/* tokenwarp: depth-based viewpoint warping at vision-transformer token
 * granularity, plus overlap-binned view-pair benchmarking utilities.
 *
 * C ABI: opaque handles + status codes. Handles returned through out
 * parameters are owned by the caller and released with the matching *_free.
 * Pointers returned by accessor functions borrow from their handle and stay
 * valid until that handle is freed. On failure the out parameters are left
 * untouched and tw_last_error() describes the problem (thread-local).
 */
#ifndef TOKENWARP_H
#define TOKENWARP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TW_API __declspec(dllexport)
#else
#define TW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tw_status {
  TW_OK = 0,
  TW_ERR_INVALID_ARGUMENT = 1,
  TW_ERR_NON_POSITIVE_DEPTH = 2,
  TW_ERR_INVALID_DEPTH = 3,
  TW_ERR_INDIVISIBLE_RESOLUTION = 4,
  TW_ERR_DIMENSION_MISMATCH = 5,
  TW_ERR_EMPTY_DEPTH = 6,
  TW_ERR_DEGENERATE_DIRECTION = 7,
  TW_ERR_NEGATIVE_SCALE = 8,
  TW_ERR_INVALID_DEPTH_AT_KEYPOINT = 9,
  TW_ERR_MARKER_OUT_OF_BOUNDS = 10,
  TW_ERR_NON_PLANAR_SCENE = 11,
  TW_ERR_NON_RIGID_POSE = 12,
  TW_ERR_PARSE = 13,
  TW_ERR_IO = 14,
  TW_ERR_BAD_MAGIC = 15,
  TW_ERR_UNSUPPORTED_VERSION = 16,
  TW_ERR_TRUNCATED_FILE = 17,
  TW_ERR_INTERNAL = 127
} tw_status;

TW_API const char* tw_status_name(tw_status status);
TW_API const char* tw_last_error(void);

/* ---- plain-value types ------------------------------------------------ */

typedef struct tw_intrinsics {
  double fx, fy, cx, cy;
  uint32_t width, height;
} tw_intrinsics;

/* Rigid transform y = R x + t; rotation row-major. Camera poses are always
 * world-to-camera. */
typedef struct tw_pose {
  double rotation[9];
  double translation[3];
} tw_pose;

typedef enum tw_pose_convention {
  TW_POSE_WORLD_TO_CAMERA = 0,
  TW_POSE_CAMERA_TO_WORLD = 1
} tw_pose_convention;

typedef enum tw_direction {
  TW_SOURCE_TO_TARGET = 0,
  TW_TARGET_TO_SOURCE = 1
} tw_direction;

typedef struct tw_grid {
  uint32_t patch_size, rows, cols;
} tw_grid;

typedef struct tw_ray_hit {
  double t;
  double point[3];
  int32_t triangle;
  double barycentric[3];
} tw_ray_hit;

typedef struct tw_warp_entry {
  uint8_t valid;
  double x, y;
} tw_warp_entry;

typedef enum tw_fetch_mode {
  TW_FETCH_NEAREST = 0,
  TW_FETCH_ADAPTIVE = 1,
  TW_FETCH_FORWARD_POSITIONS = 2
} tw_fetch_mode;

typedef struct tw_fetch_entry {
  uint8_t valid;
  float src_x, src_y;
  int32_t nearest_index; /* -1 when absent */
} tw_fetch_entry;

typedef struct tw_pair_record {
  int32_t source_frame, target_frame;
  double overlap;
} tw_pair_record;

typedef struct tw_covis_point {
  int32_t point_index;
  double src_x, src_y, src_depth;
  double tgt_x, tgt_y, tgt_depth;
} tw_covis_point;

typedef struct tw_keypoint_pair {
  tw_covis_point a, b;
} tw_keypoint_pair;

typedef enum tw_marker_kind {
  TW_MARKER_CIRCLE = 0,
  TW_MARKER_TRIANGLE = 1,
  TW_MARKER_STAR = 2,
  TW_MARKER_LETTER = 3
} tw_marker_kind;

typedef struct tw_marker {
  int32_t kind; /* tw_marker_kind */
  double x, y, size;
  uint8_t color[3];
  char letter; /* A-Z, letter markers only */
} tw_marker;

typedef enum tw_task_kind {
  TW_TASK_TEXT = 0,
  TW_TASK_SHAPE = 1,
  TW_TASK_OBJECT = 2
} tw_task_kind;

typedef enum tw_jitter_mode {
  TW_JITTER_TOKEN = 0,
  TW_JITTER_PIXEL_BASELINE = 1
} tw_jitter_mode;

/* ---- opaque handles ---------------------------------------------------- */

typedef struct tw_image tw_image;
typedef struct tw_depth tw_depth;
typedef struct tw_mesh tw_mesh;
typedef struct tw_warp_field tw_warp_field;
typedef struct tw_fetch_map tw_fetch_map;
typedef struct tw_patch_list tw_patch_list;
typedef struct tw_jitter_field tw_jitter_field;
typedef struct tw_scene tw_scene;
typedef struct tw_points tw_points;
typedef struct tw_index_set tw_index_set;
typedef struct tw_covis_list tw_covis_list;
typedef struct tw_vqa tw_vqa;
typedef struct tw_frame tw_frame;

/* ---- images and depth maps --------------------------------------------- */

TW_API tw_status tw_image_create(uint32_t width, uint32_t height,
                                 const uint8_t* rgb_or_null, tw_image** out);
TW_API tw_status tw_image_load_png(const char* path, tw_image** out);
TW_API tw_status tw_image_save_png(const tw_image* image, const char* path);
TW_API void tw_image_free(tw_image* image);
TW_API uint32_t tw_image_width(const tw_image* image);
TW_API uint32_t tw_image_height(const tw_image* image);
TW_API const uint8_t* tw_image_pixels(const tw_image* image); /* h*w*3 */

TW_API tw_status tw_depth_create(uint32_t width, uint32_t height,
                                 const float* meters, tw_depth** out);
/* .pfm loads as float meters; anything else as 16-bit PNG * depth_scale. */
TW_API tw_status tw_depth_load(const char* path, double depth_scale,
                               tw_depth** out);
TW_API tw_status tw_depth_save_png16(const tw_depth* depth, double depth_scale,
                                     const char* path);
TW_API tw_status tw_depth_save_pfm(const tw_depth* depth, const char* path);
TW_API void tw_depth_free(tw_depth* depth);
TW_API uint32_t tw_depth_width(const tw_depth* depth);
TW_API uint32_t tw_depth_height(const tw_depth* depth);
TW_API const float* tw_depth_values(const tw_depth* depth);

/* ---- poses, intrinsics, grids ------------------------------------------ */

TW_API void tw_pose_identity(tw_pose* out);
TW_API tw_status tw_pose_load(const char* path, tw_pose_convention convention,
                              tw_pose* out);
TW_API tw_status tw_pose_save(const tw_pose* pose,
                              tw_pose_convention convention, const char* path);
TW_API tw_status tw_pose_inverse(const tw_pose* pose, tw_pose* out);
/* Composition of world-to-camera poses into the relative transform. */
TW_API tw_status tw_pose_relative(const tw_pose* source, const tw_pose* target,
                                  tw_direction direction, tw_pose* out);
TW_API tw_status tw_pose_apply(const tw_pose* pose, const double point[3],
                               double out[3]);

TW_API tw_status tw_intrinsics_load(const char* path, uint32_t width,
                                    uint32_t height, tw_intrinsics* out);
TW_API tw_status tw_intrinsics_save(const tw_intrinsics* intrinsics,
                                    const char* path);
TW_API tw_status tw_project_point(const tw_intrinsics* intrinsics,
                                  const double point[3], double out[2]);
TW_API tw_status tw_unproject_pixel(const tw_intrinsics* intrinsics,
                                    const double pixel[2], double depth,
                                    double out[3]);

TW_API tw_status tw_grid_make(uint32_t image_height, uint32_t image_width,
                              uint32_t patch_size, tw_grid* out);
TW_API tw_status tw_grid_center(const tw_grid* grid, uint32_t index,
                                double out[2]);

/* ---- proxy mesh and ray casting ----------------------------------------- */

/* depth_ratio_cull = 0 keeps every triangle; > 0 drops triangles whose
 * max/min vertex depth ratio exceeds it. */
TW_API tw_status tw_mesh_build(const tw_depth* depth,
                               const tw_intrinsics* intrinsics,
                               double depth_ratio_cull, tw_mesh** out);
TW_API tw_status tw_mesh_transform(const tw_mesh* mesh, const tw_pose* transform,
                                   tw_mesh** out);
TW_API void tw_mesh_free(tw_mesh* mesh);
TW_API size_t tw_mesh_vertex_count(const tw_mesh* mesh);
TW_API size_t tw_mesh_triangle_count(const tw_mesh* mesh);
/* direction must be unit length; *out_has_hit is 0 on miss. */
TW_API tw_status tw_mesh_cast_ray(const tw_mesh* mesh, const double origin[3],
                                  const double direction[3], tw_ray_hit* out,
                                  int32_t* out_has_hit);

/* ---- warping ------------------------------------------------------------ */

TW_API tw_status tw_backward_warp_grid(const tw_mesh* source_mesh,
                                       const tw_grid* target_grid,
                                       const tw_pose* source_pose,
                                       const tw_pose* target_pose,
                                       const tw_intrinsics* intrinsics,
                                       tw_warp_field** out);
TW_API tw_status tw_forward_warp_grid(const tw_depth* source_depth,
                                      const tw_grid* source_grid,
                                      const tw_pose* source_pose,
                                      const tw_pose* target_pose,
                                      const tw_intrinsics* intrinsics,
                                      tw_warp_field** out);
TW_API void tw_warp_field_free(tw_warp_field* field);
TW_API uint32_t tw_warp_field_size(const tw_warp_field* field);
TW_API tw_status tw_warp_field_entry(const tw_warp_field* field, uint32_t index,
                                     tw_warp_entry* out);

/* Pixel-wise baselines. out_mask (optional) is a grayscale validity image
 * (255 = warped, 0 = hole). */
TW_API tw_status tw_pixel_backward_warp(const tw_image* source,
                                        const tw_depth* source_depth,
                                        const tw_pose* source_pose,
                                        const tw_pose* target_pose,
                                        const tw_intrinsics* intrinsics,
                                        const uint8_t fill[3],
                                        tw_image** out_image,
                                        tw_image** out_mask);
TW_API tw_status tw_pixel_forward_warp(const tw_image* source,
                                       const tw_depth* source_depth,
                                       const tw_pose* source_pose,
                                       const tw_pose* target_pose,
                                       const tw_intrinsics* intrinsics,
                                       const uint8_t fill[3],
                                       tw_image** out_image,
                                       tw_image** out_mask);

/* ---- token fetching ------------------------------------------------------ */

TW_API tw_status tw_nearest_fetch(const tw_warp_field* field,
                                  const tw_grid* source_grid,
                                  tw_fetch_map** out);
TW_API tw_status tw_adaptive_fetch(const tw_warp_field* field,
                                   const tw_image* source, uint32_t patch_size,
                                   tw_fetch_map** out_map,
                                   tw_patch_list** out_patches);
TW_API tw_status tw_forward_positions_map(const tw_warp_field* field,
                                          const tw_grid* source_grid,
                                          tw_fetch_map** out);
TW_API void tw_fetch_map_free(tw_fetch_map* map);
TW_API tw_fetch_mode tw_fetch_map_mode(const tw_fetch_map* map);
TW_API tw_status tw_fetch_map_grid(const tw_fetch_map* map, tw_grid* out);
TW_API uint32_t tw_fetch_map_size(const tw_fetch_map* map);
TW_API tw_status tw_fetch_map_entry(const tw_fetch_map* map, uint32_t index,
                                    tw_fetch_entry* out);
TW_API tw_status tw_fetch_map_write(const tw_fetch_map* map, const char* path,
                                    int32_t emit_json);
TW_API tw_status tw_fetch_map_read(const char* path, tw_fetch_map** out);

TW_API tw_status tw_extract_fixed_patches(const tw_image* image,
                                          const tw_grid* grid,
                                          tw_patch_list** out);
TW_API void tw_patch_list_free(tw_patch_list* patches);
TW_API uint32_t tw_patch_list_count(const tw_patch_list* patches);
TW_API uint32_t tw_patch_list_patch_size(const tw_patch_list* patches);
TW_API int32_t tw_patch_list_has(const tw_patch_list* patches, uint32_t index);
TW_API const uint8_t* tw_patch_list_pixels(const tw_patch_list* patches,
                                           uint32_t index); /* l*l*3 */
TW_API tw_status tw_patch_list_center(const tw_patch_list* patches,
                                      uint32_t index, double out[2]);
/* Pastes patch k onto grid cell k; missing patches take the fill color. */
TW_API tw_status tw_patch_list_assemble(const tw_patch_list* patches,
                                        const tw_grid* grid,
                                        const uint8_t fill[3], tw_image** out);

/* ---- fetch-position jitter ------------------------------------------------ */

TW_API tw_status tw_gen_jitter_field(const tw_grid* grid,
                                     double max_displacement,
                                     uint32_t neighborhood, uint64_t seed,
                                     tw_jitter_field** out);
TW_API void tw_jitter_field_free(tw_jitter_field* field);
TW_API tw_status tw_jitter_field_get(const tw_jitter_field* field,
                                     uint32_t index, double out[2]);
TW_API tw_status tw_apply_jitter(const tw_grid* grid,
                                 const tw_jitter_field* field,
                                 const tw_image* image, uint32_t patch_size,
                                 tw_jitter_mode mode, uint64_t pixel_noise_seed,
                                 tw_patch_list** out);

/* ---- synthetic scenes ------------------------------------------------------ */

TW_API tw_status tw_scene_plane(const tw_intrinsics* intrinsics, double z,
                                uint32_t checker_period,
                                const tw_pose* target_pose, tw_scene** out);
TW_API tw_status tw_scene_two_plane(const tw_intrinsics* intrinsics,
                                    double z_near, double z_far,
                                    uint32_t split_col, uint32_t checker_period,
                                    const tw_pose* target_pose, tw_scene** out);
TW_API void tw_scene_free(tw_scene* scene);
TW_API tw_status tw_scene_image(const tw_scene* scene, tw_image** out);
TW_API tw_status tw_scene_depth(const tw_scene* scene, tw_depth** out);
TW_API tw_status tw_scene_target_image(const tw_scene* scene, tw_image** out);
TW_API tw_status tw_scene_target_depth(const tw_scene* scene, tw_depth** out);
TW_API tw_status tw_scene_poses(const tw_scene* scene, tw_pose* out_source,
                                tw_pose* out_target);
TW_API tw_status tw_scene_intrinsics(const tw_scene* scene, tw_intrinsics* out);
/* Closed-form backward correspondence; *out_valid = 0 when the ray misses. */
TW_API tw_status tw_scene_oracle(const tw_scene* scene,
                                 const double target_xy[2],
                                 double out_source_xy[2], int32_t* out_valid);

/* ---- view overlap and benchmark construction ------------------------------- */

TW_API tw_status tw_points_create(const double* xyz, size_t count,
                                  tw_points** out);
TW_API tw_status tw_points_load(const char* path, tw_points** out);
TW_API tw_status tw_points_save(const tw_points* points, const char* path);
TW_API void tw_points_free(tw_points* points);
TW_API size_t tw_points_count(const tw_points* points);
TW_API tw_status tw_points_get(const tw_points* points, size_t index,
                               double out[3]);

TW_API tw_status tw_visible_set(const tw_points* points, const tw_pose* pose,
                                const tw_intrinsics* intrinsics,
                                const tw_depth* depth,
                                double occlusion_tolerance, tw_index_set** out);
TW_API void tw_index_set_free(tw_index_set* set);
TW_API size_t tw_index_set_count(const tw_index_set* set);
TW_API const int32_t* tw_index_set_data(const tw_index_set* set);

TW_API double tw_overlap_ratio(const tw_index_set* a, const tw_index_set* b);
/* Bin index for an overlap ratio: 0 = [0.05,0.15), 1 = [0.15,0.25),
 * 2 = [0.25,0.35), -1 outside. */
TW_API int32_t tw_overlap_bin(double ratio);
TW_API const char* tw_overlap_bin_label(int32_t bin);

/* out must hold at least 3 * per_bin records. */
TW_API tw_status tw_bin_and_sample_pairs(const tw_pair_record* records,
                                         size_t count, uint32_t per_bin,
                                         uint64_t seed, tw_pair_record* out,
                                         size_t* out_count);

TW_API tw_status tw_covisible_points(const tw_points* points,
                                     const tw_index_set* source_visible,
                                     const tw_index_set* target_visible,
                                     const tw_pose* source_pose,
                                     const tw_pose* target_pose,
                                     const tw_intrinsics* intrinsics,
                                     tw_covis_list** out);
TW_API void tw_covis_list_free(tw_covis_list* list);
TW_API size_t tw_covis_list_count(const tw_covis_list* list);
TW_API tw_status tw_covis_list_get(const tw_covis_list* list, size_t index,
                                   tw_covis_point* out);

/* *out_found = 0 when no qualifying pair emerges within the attempt budget. */
TW_API tw_status tw_select_keypoint_pair(const tw_covis_list* candidates,
                                         double tau, uint64_t seed,
                                         tw_keypoint_pair* out,
                                         int32_t* out_found);

/* *out_left = 1 when the warped A lands left of the warped B. */
TW_API tw_status tw_geometry_oracle(const tw_keypoint_pair* pair,
                                    const tw_depth* source_depth,
                                    const tw_pose* source_pose,
                                    const tw_pose* target_pose,
                                    const tw_intrinsics* intrinsics,
                                    int32_t* out_left);
TW_API tw_status tw_geometry_oracle_points(const double a_source_xy[2],
                                           const double b_source_xy[2],
                                           const tw_depth* source_depth,
                                           const tw_pose* source_pose,
                                           const tw_pose* target_pose,
                                           const tw_intrinsics* intrinsics,
                                           int32_t* out_left);

TW_API tw_status tw_render_markers(const tw_image* image,
                                   const tw_marker* markers, size_t count,
                                   tw_image** out);

TW_API tw_status tw_gen_question(const tw_keypoint_pair* pair,
                                 tw_task_kind task, uint64_t seed,
                                 tw_vqa** out);
TW_API void tw_vqa_free(tw_vqa* vqa);
TW_API const char* tw_vqa_question(const tw_vqa* vqa);
TW_API const char* tw_vqa_answer(const tw_vqa* vqa);
TW_API uint32_t tw_vqa_marker_count(const tw_vqa* vqa);
/* view: 0 = source positions, 1 = target positions. */
TW_API tw_status tw_vqa_marker(const tw_vqa* vqa, uint32_t index, int32_t view,
                               tw_marker* out);
TW_API tw_status tw_vqa_set_frames(tw_vqa* vqa, const char* source_frame,
                                   const char* target_frame,
                                   const char* overlap_bin);
TW_API tw_status tw_vqa_write_json(const tw_vqa* const* instances, size_t count,
                                   const char* path);

/* ---- frame bundles --------------------------------------------------------- */

TW_API tw_status tw_frame_load(const char* image_path, const char* depth_path,
                               const char* pose_path,
                               const char* intrinsics_path,
                               tw_pose_convention convention,
                               double depth_scale, tw_frame** out);
TW_API void tw_frame_free(tw_frame* frame);
/* Borrowed pointers; valid until the frame is freed. */
TW_API const tw_image* tw_frame_image(const tw_frame* frame);
TW_API const tw_depth* tw_frame_depth(const tw_frame* frame);
TW_API tw_status tw_frame_pose(const tw_frame* frame, tw_pose* out);
TW_API tw_status tw_frame_intrinsics(const tw_frame* frame, tw_intrinsics* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TOKENWARP_H */
