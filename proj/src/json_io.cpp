#include "elt/json_io.hpp"

#include <cmath>
#include <fstream>
#include <memory>

#include "elt/errors.hpp"

namespace elt {

namespace {

using nlohmann::json;

void expect_version(const json& doc, const std::string& version) {
  if (!doc.is_object() || !doc.contains("schema_version") ||
      !doc["schema_version"].is_string() || doc["schema_version"] != version) {
    raise(Errc::VersionMismatch, "expected schema_version \"" + version + "\"");
  }
}

json interval_to_json(const Interval& interval) { return json::array({interval.on, interval.off}); }

Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    raise(Errc::VersionMismatch, "interval must be [t_on, t_off]");
  }
  const std::int64_t on = j[0].get<std::int64_t>();
  const std::int64_t off = j[1].get<std::int64_t>();
  if (on < 0 || off <= on) raise(Errc::BadInterval, "malformed interval in document");
  return Interval(on, off);
}

json node_to_json(const InstanceNode& node) {
  json j;
  if (node.is_primitive()) {
    j["kind"] = "prim";
    j["channel"] = node.schema->channel;
    j["predicate"] = node.schema->predicate.name;
    if (!node.schema->predicate.params.empty()) j["params"] = node.schema->predicate.params;
  } else {
    j["kind"] = "op";
    j["op"] = std::string(op_name(node.schema->op));
    json children = json::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
  }
  j["interval"] = interval_to_json(node.interval);
  j["mu"] = node.mu;
  return j;
}

SchemaNode schema_from_node_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) raise(Errc::VersionMismatch, "malformed node");
  if (j["kind"] == "prim") {
    PredicateRef ref;
    ref.name = j.at("predicate").get<std::string>();
    if (j.contains("params")) {
      for (const auto& [key, value] : j["params"].items()) ref.params[key] = value.get<double>();
    }
    return SchemaNode::primitive(j.at("channel").get<std::string>(), std::move(ref));
  }
  if (j["kind"] == "op") {
    const auto op = op_from_name(j.at("op").get<std::string>());
    if (!op) raise(Errc::VersionMismatch, "unknown operator in document");
    std::vector<SchemaNode> children;
    for (const auto& child : j.at("children")) children.push_back(schema_from_node_json(child));
    return SchemaNode::composite(*op, std::move(children));
  }
  raise(Errc::VersionMismatch, "unknown node kind");
}

InstanceNode instance_from_node_json(const json& j, const SchemaNode& schema) {
  InstanceNode node;
  node.schema = &schema;
  node.interval = interval_from_json(j.at("interval"));
  node.mu = j.at("mu").get<double>();
  if (!std::isfinite(node.mu) || node.mu < 0.0 || node.mu > 1.0) {
    raise(Errc::VersionMismatch, "mu must lie in [0,1]");
  }
  if (!schema.leaf) {
    const auto& children = j.at("children");
    for (std::size_t i = 0; i < schema.children.size(); ++i) {
      node.children.push_back(instance_from_node_json(children.at(i), schema.children[i]));
    }
  }
  return node;
}

json params_to_json(const OperatorParams& p) {
  return json{{"delta", p.delta},
              {"kappa", p.kappa},
              {"sigma", p.sigma},
              {"epsilon", p.epsilon},
              {"compactness_tolerance", p.compactness_tolerance}};
}

OperatorParams params_from_json(const json& j) {
  OperatorParams p;
  p.delta = j.at("delta").get<std::int64_t>();
  p.kappa = j.at("kappa").get<double>();
  p.sigma = j.at("sigma").get<double>();
  p.epsilon = j.at("epsilon").get<std::int64_t>();
  p.compactness_tolerance = j.at("compactness_tolerance").get<std::int64_t>();
  return p;
}

}  // namespace

nlohmann::json instance_to_json(const InstanceTree& tree) {
  json doc;
  doc["schema_version"] = "elt_instance_v1";
  doc["event_type"] = tree.schema ? tree.schema->event_type : "";
  doc["params"] = params_to_json(tree.params);
  doc["root"] = node_to_json(tree.root);
  return doc;
}

InstanceTree instance_from_json(const nlohmann::json& doc) {
  expect_version(doc, "elt_instance_v1");
  auto schema = std::make_shared<SchemaTree>();
  schema->event_type = doc.at("event_type").get<std::string>();
  schema->root = schema_from_node_json(doc.at("root"));
  InstanceTree tree;
  tree.params = params_from_json(doc.at("params"));
  tree.root = instance_from_node_json(doc.at("root"), schema->root);
  tree.schema = std::move(schema);
  return tree;
}

nlohmann::json detections_to_json(const std::vector<Detection>& detections) {
  json doc;
  doc["schema_version"] = "detections_v1";
  json arr = json::array();
  for (const auto& det : detections) {
    json j;
    j["t_on"] = det.interval.on;
    j["t_off"] = det.interval.off;
    j["event_type"] = det.event_type;
    j["confidence"] = det.confidence;
    j["explanation"] = det.explanation ? instance_to_json(*det.explanation) : json(nullptr);
    arr.push_back(std::move(j));
  }
  doc["detections"] = std::move(arr);
  return doc;
}

std::vector<Detection> detections_from_json(const nlohmann::json& doc) {
  expect_version(doc, "detections_v1");
  std::vector<Detection> out;
  for (const auto& j : doc.at("detections")) {
    Detection det;
    det.interval = Interval(j.at("t_on").get<std::int64_t>(), j.at("t_off").get<std::int64_t>());
    det.event_type = j.at("event_type").get<std::string>();
    det.confidence = j.at("confidence").get<double>();
    if (j.contains("explanation") && !j["explanation"].is_null()) {
      det.explanation = instance_from_json(j["explanation"]);
    }
    out.push_back(std::move(det));
  }
  return out;
}

nlohmann::json labels_to_json(const std::vector<GroundTruthEvent>& events) {
  json doc;
  doc["schema_version"] = "labels_v1";
  json arr = json::array();
  for (const auto& event : events) {
    arr.push_back(json{{"t_on", event.interval.on},
                       {"t_off", event.interval.off},
                       {"event_type", event.event_type}});
  }
  doc["events"] = std::move(arr);
  return doc;
}

std::vector<GroundTruthEvent> labels_from_json(const nlohmann::json& doc) {
  expect_version(doc, "labels_v1");
  std::vector<GroundTruthEvent> out;
  for (const auto& j : doc.at("events")) {
    GroundTruthEvent event;
    event.interval = Interval(j.at("t_on").get<std::int64_t>(), j.at("t_off").get<std::int64_t>());
    event.event_type = j.at("event_type").get<std::string>();
    if (event.event_type.empty()) raise(Errc::VersionMismatch, "event_type must be nonempty");
    out.push_back(std::move(event));
  }
  return out;
}

nlohmann::json report_to_json(const EvalReport& report) {
  json doc;
  doc["schema_version"] = "eval_report_v1";
  auto metrics_json = [](const std::vector<ThresholdMetrics>& rows) {
    json arr = json::array();
    for (const auto& m : rows) {
      arr.push_back(json{{"threshold", m.threshold},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"tp", m.tp},
                         {"fp", m.fp},
                         {"fn", m.fn}});
    }
    return arr;
  };
  doc["overall"] = metrics_json(report.overall);
  json per_type = json::object();
  for (const auto& [event_type, rows] : report.per_type) per_type[event_type] = metrics_json(rows);
  doc["per_type"] = std::move(per_type);
  json matches = json::array();
  for (const auto& m : report.matches) {
    matches.push_back(json{{"frame", m.frame},
                           {"prediction", m.prediction},
                           {"truth", m.truth},
                           {"iou", m.iou},
                           {"event_type", m.event_type}});
  }
  doc["matches"] = std::move(matches);
  return doc;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    raise(Errc::IoError, "malformed JSON in '" + path + "': " + e.what());
  }
  return doc;
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot write '" + path + "'");
  out << doc.dump(2) << "\n";
}

}  // namespace elt
