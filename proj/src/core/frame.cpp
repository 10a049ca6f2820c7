#include "core/frame.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "core/io_png.hpp"

namespace tokenwarp {

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> parse_numbers(const std::string& content,
                                  const std::string& origin) {
  std::istringstream stream(content);
  std::vector<double> values;
  double v;
  while (stream >> v) values.push_back(v);
  if (!stream.eof()) {
    std::string token;
    stream.clear();
    stream >> token;
    fail(ErrorCode::kParseError, origin + ": unexpected token '" + token + "'");
  }
  return values;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  for (char& c : tail) c = static_cast<char>(std::tolower(c));
  return tail == suffix;
}

}  // namespace

CameraPose load_pose_text(const std::string& path, PoseConvention convention) {
  std::vector<double> v = parse_numbers(read_text_file(path), path);
  if (v.size() != 16) {
    fail(ErrorCode::kParseError, path + ": expected 16 numbers for a 4x4 pose");
  }
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = v[r * 4 + c];
  }
  RigidTransform pose = RigidTransform::from_matrix(m, 1e-3);
  if (convention == PoseConvention::kCameraToWorld) pose = pose.inverse();
  return pose;
}

void save_pose_text(const CameraPose& pose, PoseConvention convention,
                    const std::string& path) {
  RigidTransform out = pose;
  if (convention == PoseConvention::kCameraToWorld) out = pose.inverse();
  Mat4 m = out.matrix();
  std::ostringstream buf;
  buf.precision(17);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      buf << m(r, c) << (c == 3 ? "\n" : " ");
    }
  }
  std::string blob = buf.str();
  atomic_write_file(path, blob.data(), blob.size());
}

IntrinsicsParams parse_intrinsics_text(const std::string& content) {
  std::vector<double> v = parse_numbers(content, "intrinsics");
  IntrinsicsParams p;
  if (v.size() == 4) {
    p.fx = v[0];
    p.fy = v[1];
    p.cx = v[2];
    p.cy = v[3];
  } else if (v.size() == 9) {
    if (v[1] != 0.0 || v[3] != 0.0 || v[6] != 0.0 || v[7] != 0.0 ||
        v[8] != 1.0) {
      fail(ErrorCode::kParseError,
           "intrinsics matrix must be [fx 0 cx; 0 fy cy; 0 0 1]");
    }
    p.fx = v[0];
    p.cx = v[2];
    p.fy = v[4];
    p.cy = v[5];
  } else {
    fail(ErrorCode::kParseError,
         "intrinsics must be 'fx fy cx cy' or a 3x3 matrix");
  }
  if (!(p.fx > 0.0) || !(p.fy > 0.0)) {
    fail(ErrorCode::kParseError, "focal lengths must be positive");
  }
  return p;
}

IntrinsicsParams load_intrinsics_text(const std::string& path) {
  return parse_intrinsics_text(read_text_file(path));
}

void save_intrinsics_text(const CameraIntrinsics& K, const std::string& path) {
  std::ostringstream buf;
  buf.precision(17);
  buf << K.fx << " " << K.fy << " " << K.cx << " " << K.cy << "\n";
  std::string blob = buf.str();
  atomic_write_file(path, blob.data(), blob.size());
}

DepthMap load_depth_file(const std::string& path, double depth_scale) {
  if (has_suffix(path, ".pfm")) {
    return load_pfm(path);
  }
  if (!(depth_scale > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "depth scale must be positive");
  }
  Gray16 raw = load_png_gray16(path);
  std::vector<float> values(raw.values.size());
  for (size_t i = 0; i < raw.values.size(); ++i) {
    values[i] = static_cast<float>(raw.values[i] * depth_scale);  // 0 stays invalid
  }
  return DepthMap(raw.width, raw.height, std::move(values));
}

void save_depth_png16(const DepthMap& depth, double depth_scale,
                      const std::string& path) {
  if (!(depth_scale > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "depth scale must be positive");
  }
  Gray16 raster;
  raster.width = depth.width();
  raster.height = depth.height();
  raster.values.resize(depth.values().size());
  for (size_t i = 0; i < depth.values().size(); ++i) {
    float v = depth.values()[i];
    double quantized =
        (v > 0.f && std::isfinite(v)) ? std::round(v / depth_scale) : 0.0;
    raster.values[i] = static_cast<uint16_t>(
        std::min(std::max(quantized, 0.0), 65535.0));
  }
  save_png_gray16(raster, path);
}

FrameBundle load_frame(const FramePaths& paths, PoseConvention convention,
                       double depth_scale) {
  FrameBundle frame;
  frame.id = paths.id;
  frame.image = load_png_rgb(paths.image);
  frame.depth = load_depth_file(paths.depth, depth_scale);
  if (frame.depth.width() != frame.image.width() ||
      frame.depth.height() != frame.image.height()) {
    fail(ErrorCode::kDimensionMismatch,
         paths.depth + ": depth dimensions do not match the image");
  }
  frame.pose = load_pose_text(paths.pose, convention);
  IntrinsicsParams p = load_intrinsics_text(paths.intrinsics);
  frame.intrinsics = {p.fx, p.fy, p.cx, p.cy, frame.image.width(),
                      frame.image.height()};
  frame.intrinsics.validate();
  return frame;
}

std::vector<Vec3> load_points_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, path + ": cannot open for reading");
  std::vector<Vec3> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream stream(line);
    double x, y, z;
    if (!(stream >> x)) continue;  // blank or comment-only line
    if (!(stream >> y >> z)) {
      fail(ErrorCode::kParseError,
           path + ":" + std::to_string(line_no) + ": expected 'x y z'");
    }
    points.emplace_back(x, y, z);
  }
  return points;
}

void save_points_text(const std::vector<Vec3>& points, const std::string& path) {
  std::ostringstream buf;
  buf.precision(17);
  for (const Vec3& p : points) {
    buf << p.x() << " " << p.y() << " " << p.z() << "\n";
  }
  std::string blob = buf.str();
  atomic_write_file(path, blob.data(), blob.size());
}

}  // namespace tokenwarp
