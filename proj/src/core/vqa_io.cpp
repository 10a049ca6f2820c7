#include "core/vqa_io.hpp"

#include <cstdio>
#include <fstream>

#include "core/io_png.hpp"

namespace tokenwarp {

namespace {

std::string color_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

Rgb color_from_hex(const std::string& s) {
  unsigned r = 0, g = 0, b = 0;
  if (s.size() != 7 || s[0] != '#' ||
      std::sscanf(s.c_str() + 1, "%02x%02x%02x", &r, &g, &b) != 3) {
    fail(ErrorCode::kParseError, "bad color literal: " + s);
  }
  return {static_cast<uint8_t>(r), static_cast<uint8_t>(g),
          static_cast<uint8_t>(b)};
}

nlohmann::json marker_to_json(const MarkerSpec& m) {
  nlohmann::json j;
  j["kind"] = marker_kind_name(m.kind);
  j["x"] = m.position.x();
  j["y"] = m.position.y();
  j["size"] = m.size;
  j["color"] = color_hex(m.color);
  if (m.kind == MarkerKind::kLetter) j["letter"] = std::string(1, m.letter);
  return j;
}

MarkerSpec marker_from_json(const nlohmann::json& j) {
  MarkerSpec m;
  m.kind = marker_kind_from_name(j.at("kind").get<std::string>());
  m.position = Vec2(j.at("x").get<double>(), j.at("y").get<double>());
  m.size = j.at("size").get<double>();
  m.color = color_from_hex(j.at("color").get<std::string>());
  if (m.kind == MarkerKind::kLetter) {
    std::string letter = j.at("letter").get<std::string>();
    if (letter.size() != 1) {
      fail(ErrorCode::kParseError, "letter markers need a single character");
    }
    m.letter = letter[0];
  }
  return m;
}

}  // namespace

nlohmann::json vqa_to_json(const VqaInstance& instance) {
  nlohmann::json j;
  j["task"] = task_kind_name(instance.task);
  j["question"] = instance.question;
  j["answer"] = instance.answer;
  nlohmann::json markers = nlohmann::json::array();
  for (const MarkerSpec& m : instance.markers) markers.push_back(marker_to_json(m));
  j["markers"] = std::move(markers);
  j["source_frame"] = instance.source_frame;
  j["target_frame"] = instance.target_frame;
  j["overlap_bin"] = instance.overlap_bin;
  return j;
}

VqaInstance vqa_from_json(const nlohmann::json& j) {
  VqaInstance out;
  out.task = task_kind_from_name(j.at("task").get<std::string>());
  out.question = j.at("question").get<std::string>();
  out.answer = j.at("answer").get<std::string>();
  for (const auto& m : j.at("markers")) {
    out.markers.push_back(marker_from_json(m));
  }
  out.source_frame = j.at("source_frame").get<std::string>();
  out.target_frame = j.at("target_frame").get<std::string>();
  out.overlap_bin = j.at("overlap_bin").get<std::string>();
  return out;
}

void write_vqa_json(const std::vector<VqaInstance>& instances,
                    const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const VqaInstance& inst : instances) j.push_back(vqa_to_json(inst));
  std::string text = j.dump(2);
  text.push_back('\n');
  atomic_write_file(path, text.data(), text.size());
}

std::vector<VqaInstance> read_vqa_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, path + ": cannot open for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, path + ": " + e.what());
  }
  std::vector<VqaInstance> out;
  try {
    for (const auto& item : j) out.push_back(vqa_from_json(item));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParseError, path + ": " + e.what());
  }
  return out;
}

}  // namespace tokenwarp
