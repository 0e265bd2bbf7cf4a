// elt — event logic tree detection engine, command-line front end.
//
// Subcommands: validate | detect | eval | render | synth
// Exit codes: 0 success, 1 domain violation (axioms, thresholds),
//             2 input or usage error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "elt/config.hpp"
#include "elt/detector.hpp"
#include "elt/errors.hpp"
#include "elt/evaluator.hpp"
#include "elt/json_io.hpp"
#include "elt/parser.hpp"
#include "elt/svg.hpp"
#include "elt/synthetic.hpp"

namespace {

int exit_code_for(elt::Errc code) {
  switch (code) {
    case elt::Errc::AxiomViolation:
    case elt::Errc::BadThreshold:
      return 1;
    default:
      return 2;
  }
}

elt::Config load_effective_config(const std::string& config_path) {
  if (!config_path.empty()) return elt::load_config(config_path);
  if (const char* env = std::getenv("ELT_CONFIG"); env != nullptr && env[0] != '\0') {
    return elt::load_config(env);
  }
  return elt::parse_config(elt::default_config_text());
}

std::vector<std::string> channels_of(const elt::EventCatalog& catalog) {
  std::set<std::string> channels;
  for (const auto& [_, schema] : catalog.schemas) {
    const auto declared = schema.declared_channels();
    channels.insert(declared.begin(), declared.end());
  }
  return {channels.begin(), channels.end()};
}

int cmd_validate(const std::string& schema_path) {
  const elt::EventCatalog catalog = elt::parse_schema_file(schema_path);
  std::printf("OK: %zu event schema(s)\n", catalog.schemas.size());
  for (const auto& [event_type, schema] : catalog.schemas) {
    std::printf("  %-20s leaves=%zu channels=", event_type.c_str(), schema.leaf_count());
    bool first = true;
    for (const auto& channel : schema.declared_channels()) {
      std::printf("%s%s", first ? "" : ",", channel.c_str());
      first = false;
    }
    std::printf("\n");
  }
  return 0;
}

struct DetectOverrides {
  double min_confidence = -1.0;
  double nms_iou = -1.0;
  int beam_width = -1;
  std::string trace_path;
};

int cmd_detect(const std::string& data_path, const std::string& schema_path,
               const std::string& config_path, const std::string& out_path,
               const DetectOverrides& overrides) {
  elt::Config config = load_effective_config(config_path);
  if (overrides.min_confidence >= 0.0) config.detector.min_confidence = overrides.min_confidence;
  if (overrides.nms_iou >= 0.0) config.detector.nms_iou = overrides.nms_iou;
  if (overrides.beam_width > 0) config.search.beam_width = overrides.beam_width;
  const elt::EventCatalog catalog = elt::parse_schema_file(schema_path, config.registry());
  const elt::SeriesFrame frame = elt::load_csv(data_path, channels_of(catalog));
  std::ofstream trace;
  if (!overrides.trace_path.empty()) {
    trace.open(overrides.trace_path, std::ios::binary);
    if (!trace) elt::raise(elt::Errc::IoError, "cannot write '" + overrides.trace_path + "'");
  }
  const auto detections =
      elt::detect(frame, catalog, config, trace.is_open() ? &trace : nullptr);
  const auto doc = elt::detections_to_json(detections);
  if (out_path.empty() || out_path == "-") {
    std::cout << doc.dump(2) << "\n";
  } else {
    elt::write_json_file(out_path, doc);
  }
  std::fprintf(stderr, "%zu detection(s)\n", detections.size());
  return 0;
}

int cmd_eval(const std::string& detections_path, const std::string& labels_path,
             const std::string& out_path, const std::vector<double>& thresholds) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::vector<elt::Detection>, std::vector<elt::GroundTruthEvent>>> pairs;
  if (fs::is_directory(detections_path) && fs::is_directory(labels_path)) {
    // pair files by stem: <stem>.detections.json with <stem>.labels.json
    std::vector<fs::path> det_files;
    for (const auto& entry : fs::directory_iterator(detections_path)) {
      if (entry.path().string().ends_with(".detections.json")) det_files.push_back(entry.path());
    }
    std::sort(det_files.begin(), det_files.end());
    for (const auto& det_file : det_files) {
      std::string name = det_file.filename().string();
      name.resize(name.size() - std::string(".detections.json").size());
      const fs::path labels_file = fs::path(labels_path) / (name + ".labels.json");
      if (!fs::exists(labels_file)) {
        elt::raise(elt::Errc::IoError, "no labels for '" + name + "'");
      }
      pairs.emplace_back(elt::detections_from_json(elt::load_json_file(det_file.string())),
                         elt::labels_from_json(elt::load_json_file(labels_file.string())));
    }
    if (pairs.empty()) elt::raise(elt::Errc::IoError, "no *.detections.json files found");
  } else {
    pairs.emplace_back(elt::detections_from_json(elt::load_json_file(detections_path)),
                       elt::labels_from_json(elt::load_json_file(labels_path)));
  }
  const elt::EvalReport report = elt::evaluate_frames(pairs, thresholds);
  std::printf("%s", elt::format_report(report).c_str());
  if (!out_path.empty()) elt::write_json_file(out_path, elt::report_to_json(report));
  return 0;
}

int cmd_render(const std::string& data_path, const std::string& detections_path,
               const std::string& out_path) {
  const auto detections = elt::detections_from_json(elt::load_json_file(detections_path));
  std::set<std::string> channels;
  for (const auto& det : detections) {
    if (det.explanation) {
      const auto declared = det.explanation->schema->declared_channels();
      channels.insert(declared.begin(), declared.end());
    }
  }
  std::vector<std::string> spec(channels.begin(), channels.end());
  if (spec.empty()) {
    // no explanations to name channels: render every column but the first
    std::ifstream in(data_path);
    std::string header;
    if (!in || !std::getline(in, header)) elt::raise(elt::Errc::IoError, "cannot read " + data_path);
    std::string cell;
    std::istringstream hs(header);
    bool first = true;
    while (std::getline(hs, cell, ',')) {
      if (!first) spec.push_back(cell);
      first = false;
    }
    if (spec.empty()) elt::raise(elt::Errc::IoError, "no data columns in " + data_path);
  }
  const elt::SeriesFrame frame = elt::load_csv(data_path, spec);
  const std::string svg = elt::render_svg(frame, detections);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) elt::raise(elt::Errc::IoError, "cannot write '" + out_path + "'");
  out << svg;
  return 0;
}

int cmd_synth(const std::string& out_dir, const std::string& config_path) {
  namespace fs = std::filesystem;
  const elt::Config config = load_effective_config(config_path);
  fs::create_directories(out_dir);
  const auto samples = elt::generate_synthetic(config.synthetic);
  char name[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(name, sizeof(name), "frame_%03zu", i);
    elt::write_csv((fs::path(out_dir) / (std::string(name) + ".csv")).string(), samples[i].frame);
    elt::write_json_file((fs::path(out_dir) / (std::string(name) + ".labels.json")).string(),
                         elt::labels_to_json(samples[i].truth));
  }
  std::ofstream schema((fs::path(out_dir) / "schema.elt").string(), std::ios::binary);
  schema << elt::synthetic_schema_text();
  std::printf("wrote %zu frame(s) to %s\n", samples.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elt — symbolic event detection over multivariate time series"};
  app.require_subcommand(1);

  std::string schema_path, data_path, config_path, out_path, detections_path, labels_path, out_dir;
  std::vector<double> thresholds{0.5, 0.9};

  auto* validate = app.add_subcommand("validate", "parse a schema file and check its axioms");
  validate->add_option("schema", schema_path, "path to .elt schema file")->required();

  DetectOverrides overrides;
  auto* detect = app.add_subcommand("detect", "detect events in a CSV series");
  detect->add_option("--data", data_path, "input CSV")->required();
  detect->add_option("--schemas", schema_path, "event schema file (.elt)")->required();
  detect->add_option("--config", config_path, "TOML config (default: $ELT_CONFIG or built-ins)");
  detect->add_option("--out", out_path, "detections JSON output path (default stdout)");
  detect->add_option("--min-confidence", overrides.min_confidence,
                     "override detector.min_confidence");
  detect->add_option("--nms-iou", overrides.nms_iou, "override detector.nms_iou");
  detect->add_option("--beam-width", overrides.beam_width, "override search.beam_width");
  detect->add_option("--trace", overrides.trace_path,
                     "stream scored assignments to this JSON-lines file");

  auto* eval = app.add_subcommand("eval", "score detections against ground truth");
  eval->add_option("--detections", detections_path, "detections_v1 JSON file or directory")
      ->required();
  eval->add_option("--labels", labels_path, "labels_v1 JSON file or directory")->required();
  eval->add_option("--out", out_path, "write the report JSON here");
  eval->add_option("--thresholds", thresholds, "IoU thresholds");

  auto* render = app.add_subcommand("render", "render signals and detections to SVG");
  render->add_option("--data", data_path, "input CSV")->required();
  render->add_option("--detections", detections_path, "detections_v1 JSON")->required();
  render->add_option("--out", out_path, "output SVG path")->required();

  auto* synth = app.add_subcommand("synth", "generate the synthetic benchmark");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--config", config_path, "TOML config with a [synthetic] section");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(schema_path);
    if (detect->parsed()) return cmd_detect(data_path, schema_path, config_path, out_path, overrides);
    if (eval->parsed()) return cmd_eval(detections_path, labels_path, out_path, thresholds);
    if (render->parsed()) return cmd_render(data_path, detections_path, out_path);
    if (synth->parsed()) return cmd_synth(out_dir, config_path);
  } catch (const elt::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
