#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tokenwarp/tokenwarp.h"

namespace twcli {

// Data-level failure: reported on stderr, exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check(tw_status status, const std::string& context) {
  if (status != TW_OK) {
    throw DataError(context + ": " + tw_status_name(status) + " (" +
                    tw_last_error() + ")");
  }
}

template <typename T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const {
    if (p) Free(p);
  }
};

using ImagePtr = std::unique_ptr<tw_image, HandleDeleter<tw_image, tw_image_free>>;
using DepthPtr = std::unique_ptr<tw_depth, HandleDeleter<tw_depth, tw_depth_free>>;
using MeshPtr = std::unique_ptr<tw_mesh, HandleDeleter<tw_mesh, tw_mesh_free>>;
using FieldPtr =
    std::unique_ptr<tw_warp_field, HandleDeleter<tw_warp_field, tw_warp_field_free>>;
using FetchMapPtr =
    std::unique_ptr<tw_fetch_map, HandleDeleter<tw_fetch_map, tw_fetch_map_free>>;
using PatchListPtr =
    std::unique_ptr<tw_patch_list, HandleDeleter<tw_patch_list, tw_patch_list_free>>;
using JitterPtr = std::unique_ptr<tw_jitter_field,
                                  HandleDeleter<tw_jitter_field, tw_jitter_field_free>>;
using ScenePtr = std::unique_ptr<tw_scene, HandleDeleter<tw_scene, tw_scene_free>>;
using PointsPtr = std::unique_ptr<tw_points, HandleDeleter<tw_points, tw_points_free>>;
using IndexSetPtr =
    std::unique_ptr<tw_index_set, HandleDeleter<tw_index_set, tw_index_set_free>>;
using CovisPtr =
    std::unique_ptr<tw_covis_list, HandleDeleter<tw_covis_list, tw_covis_list_free>>;
using VqaPtr = std::unique_ptr<tw_vqa, HandleDeleter<tw_vqa, tw_vqa_free>>;
using FramePtr = std::unique_ptr<tw_frame, HandleDeleter<tw_frame, tw_frame_free>>;

inline tw_pose_convention parse_convention(const std::string& name) {
  if (name == "w2c") return TW_POSE_WORLD_TO_CAMERA;
  if (name == "c2w") return TW_POSE_CAMERA_TO_WORLD;
  throw DataError("unknown pose convention: " + name + " (use w2c or c2w)");
}

struct FrameEntry {
  std::string id;
  std::string image;
  std::string depth;
  std::string pose;
  std::string intrinsics;
};

struct Manifest {
  std::vector<FrameEntry> frames;

  const FrameEntry& find(const std::string& id) const {
    for (const auto& f : frames) {
      if (f.id == id) return f;
    }
    throw DataError("frame id not in manifest: " + id);
  }
};

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError(tmp + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw DataError(tmp + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

// Manifest: {"frames": [{id, image, depth, pose, intrinsics}, ...]};
// paths are resolved relative to the manifest location.
inline Manifest load_manifest(const std::string& path) {
  nlohmann::json j = load_json_file(path);
  auto base = std::filesystem::path(path).parent_path();
  Manifest m;
  try {
    for (const auto& item : j.at("frames")) {
      FrameEntry f;
      f.id = item.at("id").get<std::string>();
      f.image = (base / item.at("image").get<std::string>()).string();
      f.depth = (base / item.at("depth").get<std::string>()).string();
      f.pose = (base / item.at("pose").get<std::string>()).string();
      f.intrinsics = (base / item.at("intrinsics").get<std::string>()).string();
      m.frames.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  if (m.frames.empty()) throw DataError(path + ": manifest lists no frames");
  return m;
}

inline FramePtr load_frame(const FrameEntry& entry, tw_pose_convention convention,
                           double depth_scale) {
  tw_frame* frame = nullptr;
  check(tw_frame_load(entry.image.c_str(), entry.depth.c_str(),
                      entry.pose.c_str(), entry.intrinsics.c_str(), convention,
                      depth_scale, &frame),
        "loading frame " + entry.id);
  return FramePtr(frame);
}

}  // namespace twcli
