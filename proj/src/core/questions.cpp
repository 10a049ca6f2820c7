#include "core/questions.hpp"

#include "core/rng.hpp"

namespace tokenwarp {

const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kText: return "text";
    case TaskKind::kShape: return "shape";
    case TaskKind::kObject: return "object";
  }
  return "?";
}

TaskKind task_kind_from_name(const std::string& name) {
  if (name == "text") return TaskKind::kText;
  if (name == "shape") return TaskKind::kShape;
  if (name == "object") return TaskKind::kObject;
  fail(ErrorCode::kParseError, "unknown task kind: " + name);
}

namespace {

constexpr double kLetterSize = 8.0;
constexpr double kShapeSize = 8.0;
constexpr double kObjectRadius = 6.0;
constexpr Rgb kMarkerColor = {255, 0, 0};

MarkerSpec marker_at(const Vec2& position, MarkerKind kind, char letter,
                     double size) {
  MarkerSpec m;
  m.kind = kind;
  m.position = position;
  m.size = size;
  m.color = kMarkerColor;
  m.letter = letter;
  return m;
}

}  // namespace

VqaInstance gen_question(const KeypointPair& pair, TaskKind task,
                         uint64_t seed) {
  VqaInstance out;
  out.task = task;

  CounterRng rng(seed);
  bool right_first = rng.bounded(2) == 0;
  std::string options =
      right_first ? "on the right or left" : "on the left or right";

  switch (task) {
    case TaskKind::kText: {
      out.question = "Is the A point " + options + " of the B point?";
      out.answer = pair.a.target_px.x() < pair.b.target_px.x() ? "left" : "right";
      out.markers = {
          marker_at(pair.a.source_px, MarkerKind::kLetter, 'A', kLetterSize),
          marker_at(pair.b.source_px, MarkerKind::kLetter, 'B', kLetterSize)};
      out.target_markers = {
          marker_at(pair.a.target_px, MarkerKind::kLetter, 'A', kLetterSize),
          marker_at(pair.b.target_px, MarkerKind::kLetter, 'B', kLetterSize)};
      break;
    }
    case TaskKind::kShape: {
      // A carries the star, B the triangle.
      out.question = "Is the star shape " + options + " of the triangle shape?";
      out.answer = pair.a.target_px.x() < pair.b.target_px.x() ? "left" : "right";
      out.markers = {
          marker_at(pair.a.source_px, MarkerKind::kStar, 0, kShapeSize),
          marker_at(pair.b.source_px, MarkerKind::kTriangle, 0, kShapeSize)};
      out.target_markers = {
          marker_at(pair.a.target_px, MarkerKind::kStar, 0, kShapeSize),
          marker_at(pair.b.target_px, MarkerKind::kTriangle, 0, kShapeSize)};
      break;
    }
    case TaskKind::kObject: {
      out.question = "Can you describe the object or feature at the red point?";
      out.answer.clear();  // reference descriptions come from elsewhere
      out.markers = {
          marker_at(pair.a.source_px, MarkerKind::kCircle, 0, kObjectRadius)};
      out.target_markers = {
          marker_at(pair.a.target_px, MarkerKind::kCircle, 0, kObjectRadius)};
      break;
    }
  }
  return out;
}

}  // namespace tokenwarp
