#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <random>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "elt/config.hpp"
#include "elt/errors.hpp"
#include "elt/json_io.hpp"
#include "elt/series.hpp"
#include "elt/svg.hpp"
#include "elt/synthetic.hpp"

using namespace elt;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return ELT_CLI_PATH; }

int run(const std::string& args) {
  const std::string command = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("elt_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("validate: exit 0 on a clean schema, 1 on axiom violations, 2 on syntax") {
  const fs::path good = work_dir() / "good.elt";
  write_file(good, R"(event "e" { SEQ(prim(channel="A",predicate=rise), prim(channel="B",predicate=fall)) })");
  CHECK(run("validate " + good.string()) == 0);

  const fs::path axiom = work_dir() / "axiom.elt";
  write_file(axiom, R"(event "e" { SEQ(prim(channel="A",predicate=rise)) })");
  CHECK(run("validate " + axiom.string()) == 1);

  const fs::path syntax = work_dir() / "syntax.elt";
  write_file(syntax, R"(event "e" { SEQ(prim(channel=)");
  CHECK(run("validate " + syntax.string()) == 2);

  CHECK(run("validate " + (work_dir() / "missing.elt").string()) == 2);
}

TEST_CASE("detect: writes detections_v1, deterministic byte-for-byte") {
  Config config = parse_config(default_config_text());
  config.synthetic.n_frames = 1;
  config.synthetic.min_length = 700;
  config.synthetic.max_length = 1100;
  const auto suite = generate_synthetic(config.synthetic);
  const fs::path csv = work_dir() / "frame.csv";
  write_csv(csv.string(), suite[0].frame);
  const fs::path schema = work_dir() / "schema.elt";
  write_file(schema, synthetic_schema_text());

  const fs::path out1 = work_dir() / "det1.json";
  const fs::path out2 = work_dir() / "det2.json";
  REQUIRE(run("detect --data " + csv.string() + " --schemas " + schema.string() + " --out " +
              out1.string()) == 0);
  REQUIRE(run("detect --data " + csv.string() + " --schemas " + schema.string() + " --out " +
              out2.string()) == 0);
  CHECK(read_file(out1) == read_file(out2));

  const auto detections = detections_from_json(load_json_file(out1.string()));
  REQUIRE_FALSE(detections.empty());
  CHECK(detections[0].event_type == suite[0].truth[0].event_type);

  // bad channel mapping: schema wants a channel the CSV lacks
  const fs::path bad_schema = work_dir() / "bad_schema.elt";
  write_file(bad_schema, R"(event "e" { SEQ(prim(channel="flow",predicate=rise), prim(channel="volume",predicate=fall)) })");
  CHECK(run("detect --data " + csv.string() + " --schemas " + bad_schema.string() + " --out " +
            (work_dir() / "nope.json").string()) == 2);

  // the optional search trace streams JSON lines of scored assignments
  const fs::path trace = work_dir() / "trace.jsonl";
  REQUIRE(run("detect --data " + csv.string() + " --schemas " + schema.string() + " --out " +
              (work_dir() / "det3.json").string() + " --trace " + trace.string()) == 0);
  std::ifstream in(trace);
  std::string line;
  REQUIRE(std::getline(in, line));
  const auto parsed = nlohmann::json::parse(line);
  CHECK(parsed.contains("score"));
  CHECK(parsed.contains("assignment"));
  CHECK(parsed.at("method") == "beam");
}

TEST_CASE("detect on pure noise exits 0 with an empty detections array") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss;
  std::vector<double> p(600), v(600);
  for (auto& x : p) x = 5000.0 + 40.0 * gauss(rng);
  for (auto& x : v) x = 100.0 + 3.0 * gauss(rng);
  const SeriesFrame frame({"pressure", "volume"}, {std::move(p), std::move(v)});
  const fs::path csv = work_dir() / "noise.csv";
  write_csv(csv.string(), frame);
  const fs::path schema = work_dir() / "noise_schema.elt";
  write_file(schema, synthetic_schema_text());
  const fs::path out = work_dir() / "noise_det.json";
  CHECK(run("detect --data " + csv.string() + " --schemas " + schema.string() + " --out " +
            out.string()) == 0);
  const auto doc = load_json_file(out.string());
  CHECK(doc.at("detections").is_array());
  CHECK(doc.at("detections").empty());
}

TEST_CASE("eval: reproduces the hand-counted fixture and gates versions") {
  const fs::path det = work_dir() / "eval_det.json";
  const fs::path labels = work_dir() / "eval_labels.json";
  Detection d;
  d.interval = Interval(0, 6);
  d.event_type = "a";
  d.confidence = 0.9;
  write_json_file(det.string(), detections_to_json({d}));
  write_json_file(labels.string(),
                  labels_to_json({GroundTruthEvent{Interval(0, 10), "a"},
                                  GroundTruthEvent{Interval(50, 60), "a"}}));
  const fs::path report_path = work_dir() / "report.json";
  REQUIRE(run("eval --detections " + det.string() + " --labels " + labels.string() + " --out " +
              report_path.string()) == 0);
  const auto report = load_json_file(report_path.string());
  CHECK(report.at("overall")[0].at("f1").get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(report.at("overall")[1].at("f1").get<double>() == 0.0);

  // schema-version mismatch is a usage error
  auto bad = detections_to_json({d});
  bad["schema_version"] = "detections_v0";
  const fs::path bad_path = work_dir() / "bad_det.json";
  write_json_file(bad_path.string(), bad);
  CHECK(run("eval --detections " + bad_path.string() + " --labels " + labels.string()) == 2);
}

TEST_CASE("render: structural SVG content and byte determinism") {
  Config config = parse_config(default_config_text());
  config.synthetic.n_frames = 1;
  config.synthetic.min_length = 700;
  config.synthetic.max_length = 1100;
  const auto suite = generate_synthetic(config.synthetic);
  const fs::path csv = work_dir() / "render_frame.csv";
  write_csv(csv.string(), suite[0].frame);
  const fs::path schema = work_dir() / "render_schema.elt";
  write_file(schema, synthetic_schema_text());
  const fs::path det = work_dir() / "render_det.json";
  REQUIRE(run("detect --data " + csv.string() + " --schemas " + schema.string() + " --out " +
              det.string()) == 0);

  const fs::path svg1 = work_dir() / "plot1.svg";
  const fs::path svg2 = work_dir() / "plot2.svg";
  REQUIRE(run("render --data " + csv.string() + " --detections " + det.string() + " --out " +
              svg1.string()) == 0);
  REQUIRE(run("render --data " + csv.string() + " --detections " + det.string() + " --out " +
              svg2.string()) == 0);
  const std::string svg = read_file(svg1);
  CHECK(svg == read_file(svg2));

  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = svg.find(needle); at != std::string::npos;
         at = svg.find(needle, at + 1)) {
      ++n;
    }
    return n;
  };
  const auto detections = detections_from_json(load_json_file(det.string()));
  CHECK(count("<polyline") == suite[0].frame.channel_count());
  CHECK(count("class=\"detection\"") == detections.size());
  CHECK(count("class=\"tree\"") == std::min<std::size_t>(detections.size(), 3));
  CHECK(svg.rfind("<svg", 0) == 0);

  // empty detections: plot only, no shading
  const fs::path no_det = work_dir() / "empty_det.json";
  write_json_file(no_det.string(), detections_to_json({}));
  const fs::path svg3 = work_dir() / "plot3.svg";
  REQUIRE(run("render --data " + csv.string() + " --detections " + no_det.string() + " --out " +
              svg3.string()) == 0);
  const std::string empty_svg = read_file(svg3);
  CHECK(empty_svg.find("class=\"detection\"") == std::string::npos);
  CHECK(empty_svg.find("<polyline") != std::string::npos);
}

TEST_CASE("synth: deterministic dataset emission, then eval closes the loop") {
  const fs::path cfg = work_dir() / "synth.toml";
  write_file(cfg, "[synthetic]\nseed = 11\nn_frames = 2\nnoise = 0.05\n");
  const fs::path out_a = work_dir() / "suite_a";
  const fs::path out_b = work_dir() / "suite_b";
  REQUIRE(run("synth --out " + out_a.string() + " --config " + cfg.string()) == 0);
  REQUIRE(run("synth --out " + out_b.string() + " --config " + cfg.string()) == 0);
  for (const char* name : {"frame_000.csv", "frame_000.labels.json", "frame_001.csv", "schema.elt"}) {
    CHECK(read_file(out_a / name) == read_file(out_b / name));
  }
  const auto labels = labels_from_json(load_json_file((out_a / "frame_000.labels.json").string()));
  REQUIRE_FALSE(labels.empty());

  // detections evaluated against their own labels via files
  const fs::path det = work_dir() / "loop_det.json";
  REQUIRE(run("detect --data " + (out_a / "frame_000.csv").string() + " --schemas " +
              (out_a / "schema.elt").string() + " --out " + det.string()) == 0);
  CHECK(run("eval --detections " + det.string() + " --labels " +
            (out_a / "frame_000.labels.json").string()) == 0);
}

TEST_CASE("the shipped default config file parses to the built-in defaults") {
  const Config from_file = load_config(std::string(ELT_SOURCE_DIR) + "/configs/default.toml");
  const Config builtin = parse_config(default_config_text());
  CHECK(from_file.op.delta_frac == builtin.op.delta_frac);
  CHECK(from_file.op.kappa == builtin.op.kappa);
  CHECK(from_file.search.beam_width == builtin.search.beam_width);
  CHECK(from_file.candidates.max_candidates == builtin.candidates.max_candidates);
  CHECK(from_file.candidates.min_len_frac == builtin.candidates.min_len_frac);
  CHECK(from_file.detector.min_confidence == builtin.detector.min_confidence);
  CHECK(from_file.detector.exclusive_groups == builtin.detector.exclusive_groups);
  CHECK(from_file.synthetic.seed == builtin.synthetic.seed);
  CHECK(from_file.synthetic.n_frames == 48);
}

TEST_CASE("config: unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config("[operator]\nwarp = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[mystery]\nx = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[predicates.rise]\nnope = 1\n"), Error);
  const Config config = parse_config(
      "[operator]\ndelta_frac = 0.1\nkappa = 0.5\n"
      "[search]\nbeam_width = 8\n"
      "[detector]\nmin_confidence = 0.4\nexclusive = [[\"a\", \"b\"]]\n"
      "[predicates.rise]\nslope = 0.7\n");
  CHECK(config.op.delta_frac == 0.1);
  CHECK(config.search.beam_width == 8);
  CHECK(config.detector.exclusive_groups == std::vector<std::vector<std::string>>{{"a", "b"}});
  const auto params = config.op.resolve(100);
  CHECK(params.delta == 10);
  CHECK(params.compactness_tolerance == 10);
  CHECK(config.registry().at("rise").gates[0].theta == 0.7);
}
