#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/markers.hpp"
#include "core/viewbench.hpp"

namespace tokenwarp {

enum class TaskKind : int { kText = 0, kShape = 1, kObject = 2 };

const char* task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(const std::string& name);

struct VqaInstance {
  TaskKind task = TaskKind::kText;
  std::string question;
  std::string answer;  // "left"/"right" for text/shape; empty for object
  std::vector<MarkerSpec> markers;         // source-view positions
  std::vector<MarkerSpec> target_markers;  // same markers in the target view
  std::string source_frame;
  std::string target_frame;
  std::string overlap_bin;
};

// Fills the fixed question template for the task; the seed flips the order
// of the left/right options. The label comes from the target-view
// x-coordinates of the keypoints. Object instances carry one red circular
// marker and no reference answer.
VqaInstance gen_question(const KeypointPair& pair, TaskKind task, uint64_t seed);

}  // namespace tokenwarp
