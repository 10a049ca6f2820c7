#pragma once

#include <string>
#include <vector>

#include "core/questions.hpp"
#include "json.hpp"

namespace tokenwarp {

// One record per instance:
//   {task, question, answer, markers:[{kind,x,y,size,color}],
//    source_frame, target_frame, overlap_bin}
// Marker positions are source-view coordinates; color is "#rrggbb".
nlohmann::json vqa_to_json(const VqaInstance& instance);
VqaInstance vqa_from_json(const nlohmann::json& j);

void write_vqa_json(const std::vector<VqaInstance>& instances,
                    const std::string& path);
std::vector<VqaInstance> read_vqa_json(const std::string& path);

}  // namespace tokenwarp
