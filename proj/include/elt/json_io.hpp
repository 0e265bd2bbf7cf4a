#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "elt/detector.hpp"
#include "elt/evaluator.hpp"
#include "elt/logic.hpp"
#include "elt/series.hpp"

namespace elt {

// Schema-versioned documents:
//   elt_instance_v1  — an instantiated tree with per-node interval and mu
//   detections_v1    — array of detections, each embedding its explanation
//   labels_v1        — ground-truth events of one frame

nlohmann::json instance_to_json(const InstanceTree& tree);
InstanceTree instance_from_json(const nlohmann::json& doc);

nlohmann::json detections_to_json(const std::vector<Detection>& detections);
std::vector<Detection> detections_from_json(const nlohmann::json& doc);

nlohmann::json labels_to_json(const std::vector<GroundTruthEvent>& events);
std::vector<GroundTruthEvent> labels_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const EvalReport& report);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace elt
