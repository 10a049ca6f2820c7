// tokenwarp CLI: synthetic scenes, token/pixel warping, overlap-binned pair
// selection, VQA annotation with a geometry oracle, and fetch-position
// jitter. Everything runs through the shared C API.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_util.hpp"
#include "json.hpp"
#include "tokenwarp/tokenwarp.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twcli;

namespace {

constexpr double kDeg = M_PI / 180.0;

// World-to-camera pose of a camera at `center` oriented by yaw (about y),
// pitch (about x) and roll (about z), applied in that order camera-to-world.
tw_pose make_pose(double tx, double ty, double tz, double yaw_deg,
                  double pitch_deg, double roll_deg) {
  double cy = std::cos(yaw_deg * kDeg), sy = std::sin(yaw_deg * kDeg);
  double cp = std::cos(pitch_deg * kDeg), sp = std::sin(pitch_deg * kDeg);
  double cr = std::cos(roll_deg * kDeg), sr = std::sin(roll_deg * kDeg);
  // Rotation matrices, row-major.
  double ry[9] = {cy, 0, sy, 0, 1, 0, -sy, 0, cy};
  double rx[9] = {1, 0, 0, 0, cp, -sp, 0, sp, cp};
  double rz[9] = {cr, -sr, 0, sr, cr, 0, 0, 0, 1};
  auto matmul = [](const double* a, const double* b, double* out) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        out[i * 3 + j] = a[i * 3] * b[j] + a[i * 3 + 1] * b[3 + j] +
                         a[i * 3 + 2] * b[6 + j];
      }
    }
  };
  double tmp[9], c2w[9];
  matmul(ry, rx, tmp);
  matmul(tmp, rz, c2w);
  tw_pose pose;
  // world-to-camera: R = c2w', t = -R * center.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) pose.rotation[i * 3 + j] = c2w[j * 3 + i];
  }
  double center[3] = {tx, ty, tz};
  for (int i = 0; i < 3; ++i) {
    pose.translation[i] = -(pose.rotation[i * 3] * center[0] +
                            pose.rotation[i * 3 + 1] * center[1] +
                            pose.rotation[i * 3 + 2] * center[2]);
  }
  return pose;
}

struct ParsedFill {
  uint8_t rgb[3] = {0, 0, 0};
};

ParsedFill parse_fill(const std::string& text) {
  ParsedFill fill;
  unsigned r = 0, g = 0, b = 0;
  if (std::sscanf(text.c_str(), "%u,%u,%u", &r, &g, &b) != 3 || r > 255 ||
      g > 255 || b > 255) {
    throw DataError("fill must be R,G,B with each channel in 0..255");
  }
  fill.rgb[0] = static_cast<uint8_t>(r);
  fill.rgb[1] = static_cast<uint8_t>(g);
  fill.rgb[2] = static_cast<uint8_t>(b);
  return fill;
}

void save_image(const tw_image* image, const std::string& path,
                const std::string& what) {
  check(tw_image_save_png(image, path.c_str()), "writing " + what);
}

/* ---- synth ----------------------------------------------------------- */

struct SynthArgs {
  std::string scene = "plane";
  std::string out_dir;
  int size = 128;
  double fx = 100.0, fy = 100.0;
  double depth = 2.0;
  double near_z = 1.0, far_z = 4.0;
  int split_col = -1;
  int checker = 16;
  double tx = 0.2, ty = 0.0, tz = 0.0;
  double yaw = 0.0, pitch = 0.0, roll = 0.0;
  double depth_scale = 0.001;
};

int run_synth(const SynthArgs& args) {
  fs::create_directories(args.out_dir);
  tw_intrinsics K{args.fx, args.fy, args.size / 2.0, args.size / 2.0,
                  static_cast<uint32_t>(args.size),
                  static_cast<uint32_t>(args.size)};
  tw_pose target =
      make_pose(args.tx, args.ty, args.tz, args.yaw, args.pitch, args.roll);

  tw_scene* raw = nullptr;
  int split = args.split_col >= 0 ? args.split_col : args.size / 2;
  if (args.scene == "plane") {
    check(tw_scene_plane(&K, args.depth, args.checker, &target, &raw),
          "generating plane scene");
  } else if (args.scene == "two-plane") {
    check(tw_scene_two_plane(&K, args.near_z, args.far_z, split, args.checker,
                             &target, &raw),
          "generating two-plane scene");
  } else {
    throw CLI::ValidationError("--scene must be plane or two-plane");
  }
  ScenePtr scene(raw);

  auto out = [&](const char* name) {
    return (fs::path(args.out_dir) / name).string();
  };

  tw_image* img = nullptr;
  tw_depth* dep = nullptr;
  check(tw_scene_image(scene.get(), &img), "reading scene image");
  ImagePtr source_image(img);
  check(tw_scene_depth(scene.get(), &dep), "reading scene depth");
  DepthPtr source_depth(dep);
  check(tw_scene_target_image(scene.get(), &img), "rendering target view");
  ImagePtr target_image(img);
  check(tw_scene_target_depth(scene.get(), &dep), "rendering target depth");
  DepthPtr target_depth(dep);

  save_image(source_image.get(), out("source_color.png"), "source color");
  check(tw_depth_save_png16(source_depth.get(), args.depth_scale,
                            out("source_depth.png").c_str()),
        "writing source depth");
  save_image(target_image.get(), out("target_color.png"), "target color");
  check(tw_depth_save_png16(target_depth.get(), args.depth_scale,
                            out("target_depth.png").c_str()),
        "writing target depth");

  tw_pose source_pose, target_pose;
  check(tw_scene_poses(scene.get(), &source_pose, &target_pose), "scene poses");
  check(tw_pose_save(&source_pose, TW_POSE_WORLD_TO_CAMERA,
                     out("source_pose.txt").c_str()),
        "writing source pose");
  check(tw_pose_save(&target_pose, TW_POSE_WORLD_TO_CAMERA,
                     out("target_pose.txt").c_str()),
        "writing target pose");
  check(tw_intrinsics_save(&K, out("intrinsics.txt").c_str()),
        "writing intrinsics");

  json manifest;
  manifest["frames"] = json::array({
      {{"id", "source"},
       {"image", "source_color.png"},
       {"depth", "source_depth.png"},
       {"pose", "source_pose.txt"},
       {"intrinsics", "intrinsics.txt"}},
      {{"id", "target"},
       {"image", "target_color.png"},
       {"depth", "target_depth.png"},
       {"pose", "target_pose.txt"},
       {"intrinsics", "intrinsics.txt"}},
  });
  write_json_file(manifest, out("frames.json"));

  json desc;
  desc["scene"] = args.scene;
  desc["size"] = args.size;
  desc["checker_period"] = args.checker;
  desc["pose_convention"] = "w2c";
  desc["depth_scale"] = args.depth_scale;
  desc["target_camera"] = {{"tx", args.tx},   {"ty", args.ty},
                           {"tz", args.tz},   {"yaw_deg", args.yaw},
                           {"pitch_deg", args.pitch}, {"roll_deg", args.roll}};
  if (args.scene == "plane") {
    desc["depth"] = args.depth;
  } else {
    desc["near"] = args.near_z;
    desc["far"] = args.far_z;
    desc["split_col"] = split;
  }
  write_json_file(desc, out("scene.json"));
  std::cout << "wrote scene to " << args.out_dir << "\n";
  return 0;
}

/* ---- warp-pixels / warp-tokens ------------------------------------------ */

struct WarpInputs {
  std::string image, depth, src_pose, tgt_pose, intrinsics;
  std::string pose_convention;
  double depth_scale = 0.001;
};

struct LoadedPair {
  ImagePtr image;
  DepthPtr depth;
  tw_pose source_pose;
  tw_pose target_pose;
  tw_intrinsics K;
};

LoadedPair load_inputs(const WarpInputs& in) {
  tw_pose_convention conv = parse_convention(in.pose_convention);
  LoadedPair out;
  tw_image* img = nullptr;
  check(tw_image_load_png(in.image.c_str(), &img), "loading " + in.image);
  out.image.reset(img);
  tw_depth* dep = nullptr;
  check(tw_depth_load(in.depth.c_str(), in.depth_scale, &dep),
        "loading " + in.depth);
  out.depth.reset(dep);
  if (tw_depth_width(out.depth.get()) != tw_image_width(out.image.get()) ||
      tw_depth_height(out.depth.get()) != tw_image_height(out.image.get())) {
    throw DataError("depth dimensions do not match the image");
  }
  check(tw_pose_load(in.src_pose.c_str(), conv, &out.source_pose),
        "loading " + in.src_pose);
  check(tw_pose_load(in.tgt_pose.c_str(), conv, &out.target_pose),
        "loading " + in.tgt_pose);
  check(tw_intrinsics_load(in.intrinsics.c_str(),
                           tw_image_width(out.image.get()),
                           tw_image_height(out.image.get()), &out.K),
        "loading " + in.intrinsics);
  return out;
}

int run_warp_pixels(const WarpInputs& in, const std::string& mode,
                    const std::string& out_path, const std::string& mask_path,
                    const std::string& fill_text) {
  LoadedPair data = load_inputs(in);
  ParsedFill fill = parse_fill(fill_text);

  tw_image* warped = nullptr;
  tw_image* mask = nullptr;
  tw_image** mask_arg = mask_path.empty() ? nullptr : &mask;
  if (mode == "backward") {
    check(tw_pixel_backward_warp(data.image.get(), data.depth.get(),
                                 &data.source_pose, &data.target_pose, &data.K,
                                 fill.rgb, &warped, mask_arg),
          "backward pixel warp");
  } else {
    check(tw_pixel_forward_warp(data.image.get(), data.depth.get(),
                                &data.source_pose, &data.target_pose, &data.K,
                                fill.rgb, &warped, mask_arg),
          "forward pixel warp");
  }
  ImagePtr warped_owner(warped);
  ImagePtr mask_owner(mask);
  save_image(warped, out_path, "warped image");
  if (!mask_path.empty()) save_image(mask, mask_path, "validity mask");
  return 0;
}

int run_warp_tokens(const WarpInputs& in, const std::string& direction,
                    const std::string& fetch, int patch_size,
                    const std::string& out_path, bool emit_json,
                    const std::string& warped_image_path) {
  LoadedPair data = load_inputs(in);
  tw_grid grid;
  check(tw_grid_make(tw_image_height(data.image.get()),
                     tw_image_width(data.image.get()), patch_size, &grid),
        "building the patch grid");

  FetchMapPtr map;
  PatchListPtr patches;
  if (direction == "forward") {
    tw_warp_field* field = nullptr;
    check(tw_forward_warp_grid(data.depth.get(), &grid, &data.source_pose,
                               &data.target_pose, &data.K, &field),
          "forward token warp");
    FieldPtr field_owner(field);
    tw_fetch_map* raw = nullptr;
    check(tw_forward_positions_map(field, &grid, &raw), "positions map");
    map.reset(raw);
  } else {
    tw_mesh* mesh = nullptr;
    check(tw_mesh_build(data.depth.get(), &data.K, 0.0, &mesh),
          "building the proxy mesh");
    MeshPtr mesh_owner(mesh);
    tw_warp_field* field = nullptr;
    check(tw_backward_warp_grid(mesh, &grid, &data.source_pose,
                                &data.target_pose, &data.K, &field),
          "backward token warp");
    FieldPtr field_owner(field);
    if (fetch == "adaptive") {
      tw_fetch_map* raw = nullptr;
      tw_patch_list* plist = nullptr;
      check(tw_adaptive_fetch(field, data.image.get(), patch_size, &raw, &plist),
            "adaptive fetch");
      map.reset(raw);
      patches.reset(plist);
    } else {
      tw_fetch_map* raw = nullptr;
      check(tw_nearest_fetch(field, &grid, &raw), "nearest fetch");
      map.reset(raw);
    }
  }

  check(tw_fetch_map_write(map.get(), out_path.c_str(), emit_json ? 1 : 0),
        "writing " + out_path);

  if (!warped_image_path.empty()) {
    if (direction == "forward") {
      throw DataError("--warped-image applies to backward warping only");
    }
    if (!patches) {
      // Nearest mode: fetch the precomputed fixed patch each cell selected.
      tw_patch_list* fixed = nullptr;
      check(tw_extract_fixed_patches(data.image.get(), &grid, &fixed),
            "fixed patchification");
      PatchListPtr fixed_owner(fixed);
      uint32_t n = tw_fetch_map_size(map.get());
      uint32_t l = static_cast<uint32_t>(patch_size);
      std::vector<uint8_t> canvas(static_cast<size_t>(grid.rows) * l *
                                  grid.cols * l * 3, 0);
      uint32_t row_px = grid.cols * l;
      for (uint32_t i = 0; i < n; ++i) {
        tw_fetch_entry entry;
        check(tw_fetch_map_entry(map.get(), i, &entry), "fetch entry");
        if (!entry.valid || entry.nearest_index < 0) continue;
        const uint8_t* src =
            tw_patch_list_pixels(fixed, static_cast<uint32_t>(entry.nearest_index));
        uint32_t r = i / grid.cols, c = i % grid.cols;
        for (uint32_t dy = 0; dy < l; ++dy) {
          std::copy(src + static_cast<size_t>(dy) * l * 3,
                    src + static_cast<size_t>(dy + 1) * l * 3,
                    canvas.begin() +
                        (static_cast<size_t>(r * l + dy) * row_px + c * l) * 3);
        }
      }
      tw_image* assembled = nullptr;
      check(tw_image_create(row_px, grid.rows * l, canvas.data(), &assembled),
            "assembling fetched patches");
      ImagePtr owner(assembled);
      save_image(assembled, warped_image_path, "fetched-token image");
    } else {
      tw_image* assembled = nullptr;
      uint8_t fill[3] = {0, 0, 0};
      check(tw_patch_list_assemble(patches.get(), &grid, fill, &assembled),
            "assembling adaptive patches");
      ImagePtr owner(assembled);
      save_image(assembled, warped_image_path, "fetched-token image");
    }
  }
  return 0;
}

/* ---- overlap / pairs -------------------------------------------------------- */

PointsPtr gather_points(const Manifest& manifest,
                        const std::vector<FramePtr>& frames,
                        const std::string& points_path, bool from_depth,
                        int stride) {
  if (!points_path.empty()) {
    tw_points* raw = nullptr;
    check(tw_points_load(points_path.c_str(), &raw), "loading " + points_path);
    return PointsPtr(raw);
  }
  if (!from_depth) {
    throw DataError("provide --points FILE or --points-from-depth");
  }
  std::vector<double> xyz;
  for (size_t f = 0; f < frames.size(); ++f) {
    const tw_depth* depth = tw_frame_depth(frames[f].get());
    tw_intrinsics K;
    check(tw_frame_intrinsics(frames[f].get(), &K), "frame intrinsics");
    tw_pose pose, cam_to_world;
    check(tw_frame_pose(frames[f].get(), &pose), "frame pose");
    check(tw_pose_inverse(&pose, &cam_to_world), "pose inverse");
    const float* values = tw_depth_values(depth);
    uint32_t w = tw_depth_width(depth), h = tw_depth_height(depth);
    for (uint32_t y = stride / 2; y < h; y += stride) {
      for (uint32_t x = stride / 2; x < w; x += stride) {
        float d = values[static_cast<size_t>(y) * w + x];
        if (!(d > 0.f) || !std::isfinite(d)) continue;
        double pixel[2] = {x + 0.5, y + 0.5};
        double cam[3], world[3];
        check(tw_unproject_pixel(&K, pixel, d, cam), "unproject");
        check(tw_pose_apply(&cam_to_world, cam, world), "to world");
        xyz.insert(xyz.end(), {world[0], world[1], world[2]});
      }
    }
  }
  if (xyz.empty()) throw DataError("no valid depth samples to build points from");
  tw_points* raw = nullptr;
  check(tw_points_create(xyz.data(), xyz.size() / 3, &raw), "building points");
  (void)manifest;
  return PointsPtr(raw);
}

int run_overlap(const std::string& manifest_path, const std::string& points_path,
                bool from_depth, int stride, const std::string& convention,
                double depth_scale, double occlusion_tol,
                const std::string& out_path) {
  Manifest manifest = load_manifest(manifest_path);
  tw_pose_convention conv = parse_convention(convention);
  std::vector<FramePtr> frames;
  for (const auto& entry : manifest.frames) {
    frames.push_back(twcli::load_frame(entry, conv, depth_scale));
  }
  PointsPtr points =
      gather_points(manifest, frames, points_path, from_depth, stride);

  std::vector<IndexSetPtr> visible;
  for (size_t f = 0; f < frames.size(); ++f) {
    tw_pose pose;
    tw_intrinsics K;
    check(tw_frame_pose(frames[f].get(), &pose), "frame pose");
    check(tw_frame_intrinsics(frames[f].get(), &K), "frame intrinsics");
    tw_index_set* set = nullptr;
    check(tw_visible_set(points.get(), &pose, &K, tw_frame_depth(frames[f].get()),
                         occlusion_tol, &set),
          "visible set of " + manifest.frames[f].id);
    visible.emplace_back(set);
  }

  json records = json::array();
  for (size_t i = 0; i < frames.size(); ++i) {
    for (size_t j = i + 1; j < frames.size(); ++j) {
      double ratio = tw_overlap_ratio(visible[i].get(), visible[j].get());
      records.push_back({{"source_frame", manifest.frames[i].id},
                         {"target_frame", manifest.frames[j].id},
                         {"overlap", ratio}});
    }
  }
  write_json_file(records, out_path);
  std::cout << "wrote " << records.size() << " pair records to " << out_path
            << "\n";
  return 0;
}

int run_pairs(const std::string& records_path, int per_bin, uint64_t seed,
              const std::string& out_path) {
  json input = load_json_file(records_path);
  std::vector<std::string> ids;
  auto id_index = [&](const std::string& id) -> int32_t {
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) return static_cast<int32_t>(i);
    }
    ids.push_back(id);
    return static_cast<int32_t>(ids.size() - 1);
  };

  std::vector<tw_pair_record> records;
  try {
    for (const auto& item : input) {
      records.push_back(
          {id_index(item.at("source_frame").get<std::string>()),
           id_index(item.at("target_frame").get<std::string>()),
           item.at("overlap").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(records_path + ": " + e.what());
  }

  std::vector<tw_pair_record> sampled(static_cast<size_t>(per_bin) * 3);
  size_t out_count = 0;
  check(tw_bin_and_sample_pairs(records.data(), records.size(),
                                static_cast<uint32_t>(per_bin), seed,
                                sampled.data(), &out_count),
        "sampling pairs");

  json out = json::array();
  for (size_t i = 0; i < out_count; ++i) {
    out.push_back({{"source_frame", ids[sampled[i].source_frame]},
                   {"target_frame", ids[sampled[i].target_frame]},
                   {"overlap", sampled[i].overlap},
                   {"bin", tw_overlap_bin_label(tw_overlap_bin(sampled[i].overlap))}});
  }
  write_json_file(out, out_path);
  std::cout << "sampled " << out_count << " pairs to " << out_path << "\n";
  return 0;
}

/* ---- annotate / oracle --------------------------------------------------------- */

int run_annotate(const std::string& manifest_path, const std::string& pairs_path,
                 const std::string& task_name, double tau, uint64_t seed,
                 const std::string& points_path, bool from_depth, int stride,
                 const std::string& convention, double depth_scale,
                 double occlusion_tol, const std::string& out_dir) {
  tw_task_kind task;
  if (task_name == "text") {
    task = TW_TASK_TEXT;
  } else if (task_name == "shape") {
    task = TW_TASK_SHAPE;
  } else if (task_name == "object") {
    task = TW_TASK_OBJECT;
  } else {
    throw CLI::ValidationError("--task must be text, shape or object");
  }

  Manifest manifest = load_manifest(manifest_path);
  tw_pose_convention conv = parse_convention(convention);
  std::vector<FramePtr> frames;
  for (const auto& entry : manifest.frames) {
    frames.push_back(twcli::load_frame(entry, conv, depth_scale));
  }
  PointsPtr points =
      gather_points(manifest, frames, points_path, from_depth, stride);

  auto frame_index = [&](const std::string& id) -> size_t {
    for (size_t i = 0; i < manifest.frames.size(); ++i) {
      if (manifest.frames[i].id == id) return i;
    }
    throw DataError("pair references unknown frame id: " + id);
  };

  json pair_list = load_json_file(pairs_path);
  fs::create_directories(out_dir);

  std::vector<VqaPtr> instances;
  std::vector<const tw_vqa*> instance_ptrs;
  size_t pair_index = 0;
  for (const auto& item : pair_list) {
    size_t k = pair_index++;
    std::string src_id, tgt_id;
    double overlap = 0.0;
    try {
      src_id = item.at("source_frame").get<std::string>();
      tgt_id = item.at("target_frame").get<std::string>();
      overlap = item.value("overlap", 0.0);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(pairs_path + ": " + e.what());
    }
    size_t si = frame_index(src_id);
    size_t ti = frame_index(tgt_id);

    tw_pose src_pose, tgt_pose;
    tw_intrinsics K;
    check(tw_frame_pose(frames[si].get(), &src_pose), "source pose");
    check(tw_frame_pose(frames[ti].get(), &tgt_pose), "target pose");
    check(tw_frame_intrinsics(frames[si].get(), &K), "intrinsics");

    tw_index_set *vs = nullptr, *vt = nullptr;
    check(tw_visible_set(points.get(), &src_pose, &K,
                         tw_frame_depth(frames[si].get()), occlusion_tol, &vs),
          "source visible set");
    IndexSetPtr vs_owner(vs);
    check(tw_visible_set(points.get(), &tgt_pose, &K,
                         tw_frame_depth(frames[ti].get()), occlusion_tol, &vt),
          "target visible set");
    IndexSetPtr vt_owner(vt);

    tw_covis_list* covis = nullptr;
    check(tw_covisible_points(points.get(), vs, vt, &src_pose, &tgt_pose, &K,
                              &covis),
          "covisible points");
    CovisPtr covis_owner(covis);

    tw_keypoint_pair pair;
    int32_t found = 0;
    check(tw_select_keypoint_pair(covis, tau, seed + k, &pair, &found),
          "keypoint selection");
    if (!found) continue;

    tw_vqa* vqa = nullptr;
    check(tw_gen_question(&pair, task, seed + k, &vqa), "question generation");
    VqaPtr vqa_owner(vqa);
    int32_t bin = tw_overlap_bin(overlap);
    check(tw_vqa_set_frames(vqa, src_id.c_str(), tgt_id.c_str(),
                            tw_overlap_bin_label(bin)),
          "tagging instance");

    // Render the markers into both views.
    for (int view = 0; view < 2; ++view) {
      std::vector<tw_marker> markers(tw_vqa_marker_count(vqa));
      for (uint32_t m = 0; m < markers.size(); ++m) {
        check(tw_vqa_marker(vqa, m, view, &markers[m]), "marker");
      }
      const tw_image* base =
          tw_frame_image(frames[view == 0 ? si : ti].get());
      tw_image* annotated = nullptr;
      check(tw_render_markers(base, markers.data(), markers.size(), &annotated),
            "rendering markers");
      ImagePtr owner(annotated);
      std::string name = "pair" + std::to_string(k) +
                         (view == 0 ? "_source.png" : "_target.png");
      save_image(annotated, (fs::path(out_dir) / name).string(), name);
    }

    instance_ptrs.push_back(vqa);
    instances.push_back(std::move(vqa_owner));
  }

  std::string instances_path = (fs::path(out_dir) / "instances.json").string();
  check(tw_vqa_write_json(instance_ptrs.data(), instance_ptrs.size(),
                          instances_path.c_str()),
        "writing instances");
  std::cout << "wrote " << instance_ptrs.size() << " instances to "
            << instances_path << "\n";
  return 0;
}

int run_oracle(const std::string& manifest_path,
               const std::string& instances_path, const std::string& convention,
               double depth_scale, const std::string& out_path) {
  Manifest manifest = load_manifest(manifest_path);
  tw_pose_convention conv = parse_convention(convention);
  json instances = load_json_file(instances_path);

  // Cache loaded frames by id.
  std::vector<std::pair<std::string, FramePtr>> cache;
  auto frame_for = [&](const std::string& id) -> tw_frame* {
    for (auto& [fid, ptr] : cache) {
      if (fid == id) return ptr.get();
    }
    cache.emplace_back(id, twcli::load_frame(manifest.find(id), conv, depth_scale));
    return cache.back().second.get();
  };

  json out = json::array();
  int total = 0, matched = 0;
  size_t index = 0;
  for (const auto& item : instances) {
    size_t k = index++;
    std::string task = item.value("task", "");
    if (task != "text" && task != "shape") continue;  // object has no label
    std::string src_id, tgt_id, answer;
    double ax, ay, bx, by;
    try {
      src_id = item.at("source_frame").get<std::string>();
      tgt_id = item.at("target_frame").get<std::string>();
      answer = item.at("answer").get<std::string>();
      const auto& markers = item.at("markers");
      ax = markers.at(0).at("x").get<double>();
      ay = markers.at(0).at("y").get<double>();
      bx = markers.at(1).at("x").get<double>();
      by = markers.at(1).at("y").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(instances_path + ": " + e.what());
    }

    tw_frame* src = frame_for(src_id);
    tw_frame* tgt = frame_for(tgt_id);
    tw_pose src_pose, tgt_pose;
    tw_intrinsics K;
    check(tw_frame_pose(src, &src_pose), "source pose");
    check(tw_frame_pose(tgt, &tgt_pose), "target pose");
    check(tw_frame_intrinsics(src, &K), "intrinsics");

    double a[2] = {ax, ay}, b[2] = {bx, by};
    int32_t left = 0;
    check(tw_geometry_oracle_points(a, b, tw_frame_depth(src), &src_pose,
                                    &tgt_pose, &K, &left),
          "geometry oracle");
    std::string verdict = left ? "left" : "right";
    bool match = verdict == answer;
    ++total;
    if (match) ++matched;
    out.push_back({{"index", k},
                   {"oracle", verdict},
                   {"answer", answer},
                   {"match", match}});
  }
  write_json_file(out, out_path);
  if (total > 0) {
    std::cout << "oracle accuracy: " << matched << "/" << total << " ("
              << (100.0 * matched / total) << "%)\n";
  } else {
    std::cout << "no left/right instances to score\n";
  }
  return 0;
}

/* ---- jitter -------------------------------------------------------------------- */

int run_jitter(const std::string& image_path, int patch_size, double max_disp,
               uint64_t seed, bool pixel_baseline, uint64_t pixel_seed,
               int neighborhood, const std::string& out_path,
               const std::string& field_path) {
  tw_image* raw = nullptr;
  check(tw_image_load_png(image_path.c_str(), &raw), "loading " + image_path);
  ImagePtr image(raw);

  tw_grid grid;
  check(tw_grid_make(tw_image_height(image.get()), tw_image_width(image.get()),
                     patch_size, &grid),
        "building the patch grid");

  tw_jitter_field* jraw = nullptr;
  check(tw_gen_jitter_field(&grid, max_disp, neighborhood, seed, &jraw),
        "generating the jitter field");
  JitterPtr field(jraw);

  tw_patch_list* praw = nullptr;
  check(tw_apply_jitter(&grid, field.get(), image.get(), patch_size,
                        pixel_baseline ? TW_JITTER_PIXEL_BASELINE
                                       : TW_JITTER_TOKEN,
                        pixel_seed, &praw),
        "applying jitter");
  PatchListPtr patches(praw);

  tw_image* assembled = nullptr;
  uint8_t fill[3] = {0, 0, 0};
  check(tw_patch_list_assemble(patches.get(), &grid, fill, &assembled),
        "assembling patches");
  ImagePtr owner(assembled);
  save_image(assembled, out_path, "jittered image");

  if (!field_path.empty()) {
    json jf;
    jf["max_displacement"] = max_disp;
    jf["neighborhood"] = neighborhood;
    jf["seed"] = seed;
    jf["rows"] = grid.rows;
    jf["cols"] = grid.cols;
    json cells = json::array();
    for (uint32_t i = 0; i < grid.rows * grid.cols; ++i) {
      double d[2];
      check(tw_jitter_field_get(field.get(), i, d), "field entry");
      cells.push_back({{"dx", d[0]}, {"dy", d[1]}});
    }
    jf["displacements"] = std::move(cells);
    write_json_file(jf, field_path);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depth-based viewpoint warping at token granularity"};
  app.require_subcommand(1);

  // synth
  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic RGB-D scene");
  cmd_synth->add_option("--scene", synth.scene, "plane or two-plane")
      ->check(CLI::IsMember({"plane", "two-plane"}))
      ->required();
  cmd_synth->add_option("--out", synth.out_dir, "output directory")->required();
  cmd_synth->add_option("--size", synth.size, "image side in pixels");
  cmd_synth->add_option("--fx", synth.fx);
  cmd_synth->add_option("--fy", synth.fy);
  cmd_synth->add_option("--depth", synth.depth, "plane depth (m)");
  cmd_synth->add_option("--near", synth.near_z, "near plane depth (m)");
  cmd_synth->add_option("--far", synth.far_z, "far plane depth (m)");
  cmd_synth->add_option("--split-col", synth.split_col, "two-plane split column");
  cmd_synth->add_option("--checker-period", synth.checker);
  cmd_synth->add_option("--tx", synth.tx, "target camera x (m)");
  cmd_synth->add_option("--ty", synth.ty, "target camera y (m)");
  cmd_synth->add_option("--tz", synth.tz, "target camera z (m)");
  cmd_synth->add_option("--yaw-deg", synth.yaw);
  cmd_synth->add_option("--pitch-deg", synth.pitch);
  cmd_synth->add_option("--roll-deg", synth.roll);
  cmd_synth->add_option("--depth-scale", synth.depth_scale);

  // warp-pixels
  WarpInputs wp;
  std::string wp_mode, wp_out, wp_mask, wp_fill = "0,0,0";
  auto* cmd_wpx = app.add_subcommand("warp-pixels", "pixel-wise warping baseline");
  cmd_wpx->add_option("--image", wp.image)->required();
  cmd_wpx->add_option("--depth", wp.depth)->required();
  cmd_wpx->add_option("--src-pose", wp.src_pose)->required();
  cmd_wpx->add_option("--tgt-pose", wp.tgt_pose)->required();
  cmd_wpx->add_option("--intrinsics", wp.intrinsics)->required();
  cmd_wpx->add_option("--mode", wp_mode, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}))
      ->required();
  cmd_wpx->add_option("--pose-convention", wp.pose_convention, "w2c or c2w")
      ->check(CLI::IsMember({"w2c", "c2w"}))
      ->required();
  cmd_wpx->add_option("--depth-scale", wp.depth_scale);
  cmd_wpx->add_option("--out", wp_out)->required();
  cmd_wpx->add_option("--mask", wp_mask, "validity mask PNG");
  cmd_wpx->add_option("--fill", wp_fill, "hole fill color R,G,B");

  // warp-tokens
  WarpInputs wt;
  std::string wt_direction, wt_fetch = "nearest", wt_out, wt_image;
  int wt_patch = 16;
  bool wt_json = false;
  auto* cmd_wtk = app.add_subcommand("warp-tokens", "token-grid warping");
  cmd_wtk->add_option("--image", wt.image)->required();
  cmd_wtk->add_option("--depth", wt.depth)->required();
  cmd_wtk->add_option("--src-pose", wt.src_pose)->required();
  cmd_wtk->add_option("--tgt-pose", wt.tgt_pose)->required();
  cmd_wtk->add_option("--intrinsics", wt.intrinsics)->required();
  cmd_wtk->add_option("--direction", wt_direction, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}))
      ->required();
  auto* fetch_opt =
      cmd_wtk->add_option("--fetch", wt_fetch, "nearest or adaptive")
          ->check(CLI::IsMember({"nearest", "adaptive"}));
  cmd_wtk->add_option("--patch-size", wt_patch, "token side in pixels");
  cmd_wtk->add_option("--pose-convention", wt.pose_convention, "w2c or c2w")
      ->check(CLI::IsMember({"w2c", "c2w"}))
      ->required();
  cmd_wtk->add_option("--depth-scale", wt.depth_scale);
  cmd_wtk->add_option("--out", wt_out, "fetch map (.twfm)")->required();
  cmd_wtk->add_flag("--emit-json", wt_json, "write a JSON mirror");
  cmd_wtk->add_option("--warped-image", wt_image,
                      "assemble fetched patches into a PNG (backward only)");

  // overlap
  std::string ov_manifest, ov_points, ov_conv, ov_out;
  bool ov_from_depth = false;
  int ov_stride = 8;
  double ov_scale = 0.001, ov_tol = 0.02;
  auto* cmd_ov = app.add_subcommand("overlap", "visible-set overlap of all frame pairs");
  cmd_ov->add_option("--frames", ov_manifest, "frames manifest JSON")->required();
  cmd_ov->add_option("--points", ov_points, "world points text file");
  cmd_ov->add_flag("--points-from-depth", ov_from_depth,
                   "sample scene points from the frame depth maps");
  cmd_ov->add_option("--point-stride", ov_stride, "pixel stride for sampling");
  cmd_ov->add_option("--pose-convention", ov_conv, "w2c or c2w")
      ->check(CLI::IsMember({"w2c", "c2w"}))
      ->required();
  cmd_ov->add_option("--depth-scale", ov_scale);
  cmd_ov->add_option("--occlusion-tol", ov_tol);
  cmd_ov->add_option("--out", ov_out)->required();

  // pairs
  std::string pr_records, pr_out;
  int pr_per_bin = 0;
  uint64_t pr_seed = 0;
  auto* cmd_pr = app.add_subcommand("pairs", "overlap-binned pair sampling");
  cmd_pr->add_option("--records", pr_records, "overlap records JSON")->required();
  cmd_pr->add_option("--per-bin", pr_per_bin)->required();
  cmd_pr->add_option("--seed", pr_seed)->required();
  cmd_pr->add_option("--out", pr_out)->required();

  // annotate
  std::string an_manifest, an_pairs, an_task, an_points, an_conv, an_out;
  bool an_from_depth = false;
  int an_stride = 8;
  double an_tau = 50.0, an_scale = 0.001, an_tol = 0.02;
  uint64_t an_seed = 0;
  auto* cmd_an = app.add_subcommand("annotate", "build VQA instances for view pairs");
  cmd_an->add_option("--frames", an_manifest)->required();
  cmd_an->add_option("--pairs", an_pairs, "sampled pairs JSON")->required();
  cmd_an->add_option("--task", an_task, "text, shape or object")
      ->check(CLI::IsMember({"text", "shape", "object"}))
      ->required();
  cmd_an->add_option("--tau", an_tau, "minimum target-view separation (px)");
  cmd_an->add_option("--seed", an_seed)->required();
  cmd_an->add_option("--points", an_points);
  cmd_an->add_flag("--points-from-depth", an_from_depth);
  cmd_an->add_option("--point-stride", an_stride);
  cmd_an->add_option("--pose-convention", an_conv, "w2c or c2w")
      ->check(CLI::IsMember({"w2c", "c2w"}))
      ->required();
  cmd_an->add_option("--depth-scale", an_scale);
  cmd_an->add_option("--occlusion-tol", an_tol);
  cmd_an->add_option("--out-dir", an_out)->required();

  // oracle
  std::string or_manifest, or_instances, or_conv, or_out;
  double or_scale = 0.001;
  auto* cmd_or = app.add_subcommand("oracle", "geometry-based left/right answers");
  cmd_or->add_option("--frames", or_manifest)->required();
  cmd_or->add_option("--instances", or_instances)->required();
  cmd_or->add_option("--pose-convention", or_conv, "w2c or c2w")
      ->check(CLI::IsMember({"w2c", "c2w"}))
      ->required();
  cmd_or->add_option("--depth-scale", or_scale);
  cmd_or->add_option("--out", or_out)->required();

  // jitter
  std::string jt_image, jt_out, jt_field;
  int jt_patch = 16, jt_neigh = 9;
  double jt_disp = 0.0;
  uint64_t jt_seed = 0, jt_pixel_seed = 0;
  bool jt_baseline = false;
  auto* cmd_jt = app.add_subcommand("jitter", "fetch-position jitter generator");
  cmd_jt->add_option("--image", jt_image)->required();
  cmd_jt->add_option("--patch-size", jt_patch);
  cmd_jt->add_option("--max-disp", jt_disp, "max displacement (px)")->required();
  cmd_jt->add_option("--seed", jt_seed)->required();
  cmd_jt->add_flag("--pixel-baseline", jt_baseline,
                   "add per-pixel noise at 10% of the max displacement");
  cmd_jt->add_option("--pixel-seed", jt_pixel_seed);
  cmd_jt->add_option("--neighborhood", jt_neigh, "mean-filter cell count");
  cmd_jt->add_option("--out", jt_out, "jittered PNG")->required();
  cmd_jt->add_option("--field-out", jt_field, "displacement field JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage problems exit 1; --help and --version exit 0.
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_synth->parsed()) return run_synth(synth);
    if (cmd_wpx->parsed()) {
      return run_warp_pixels(wp, wp_mode, wp_out, wp_mask, wp_fill);
    }
    if (cmd_wtk->parsed()) {
      if (wt_direction == "forward" && fetch_opt->count() > 0) {
        std::cerr << "error: --fetch applies to backward warping only\n";
        return 1;
      }
      return run_warp_tokens(wt, wt_direction, wt_fetch, wt_patch, wt_out,
                             wt_json, wt_image);
    }
    if (cmd_ov->parsed()) {
      return run_overlap(ov_manifest, ov_points, ov_from_depth, ov_stride,
                         ov_conv, ov_scale, ov_tol, ov_out);
    }
    if (cmd_pr->parsed()) return run_pairs(pr_records, pr_per_bin, pr_seed, pr_out);
    if (cmd_an->parsed()) {
      return run_annotate(an_manifest, an_pairs, an_task, an_tau, an_seed,
                          an_points, an_from_depth, an_stride, an_conv,
                          an_scale, an_tol, an_out);
    }
    if (cmd_or->parsed()) {
      return run_oracle(or_manifest, or_instances, or_conv, or_scale, or_out);
    }
    if (cmd_jt->parsed()) {
      return run_jitter(jt_image, jt_patch, jt_disp, jt_seed, jt_baseline,
                        jt_pixel_seed, jt_neigh, jt_out, jt_field);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
