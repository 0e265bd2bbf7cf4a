#include "elt/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "elt/errors.hpp"

namespace elt {

OperatorParams OperatorConfig::resolve(std::int64_t series_length) const {
  OperatorParams p;
  p.delta = delta_abs >= 0
                ? delta_abs
                : std::max<std::int64_t>(
                      1, std::llround(delta_frac * static_cast<double>(series_length)));
  p.kappa = kappa;
  p.sigma = sigma_abs >= 0.0
                ? sigma_abs
                : std::max(1.0, sigma_frac * static_cast<double>(series_length));
  p.epsilon = epsilon;
  p.compactness_tolerance = compactness_abs >= 0 ? compactness_abs : p.delta;
  if (p.kappa <= 0.0) raise(Errc::BadConfig, "kappa must be positive");
  if (p.sigma <= 0.0) raise(Errc::BadConfig, "sigma must be positive");
  if (p.epsilon < 0) raise(Errc::BadConfig, "epsilon must be nonnegative");
  return p;
}

PredicateRegistry Config::registry() const {
  return PredicateRegistry::builtin().with_overrides(predicate_overrides);
}

namespace {

struct TomlValue {
  enum class Kind { Number, Bool, String, StringArray, NestedStringArray } kind;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<std::string> strings;
  std::vector<std::vector<std::string>> nested;
};

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : in_(text) {}

  /// section -> key -> value
  std::map<std::string, std::map<std::string, TomlValue>> parse() {
    std::map<std::string, std::map<std::string, TomlValue>> out;
    std::string section;
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      strip_comment(line);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']') fail("unterminated section header");
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        if (section.empty()) fail("empty section name");
        out[section];
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) fail("expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string raw = trim(trimmed.substr(eq + 1));
      if (key.empty()) fail("empty key");
      if (section.empty()) fail("key outside any [section]");
      if (out[section].count(key) != 0) fail("duplicate key '" + key + "'");
      out[section][key] = parse_value(raw);
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    raise(Errc::BadConfig, "line " + std::to_string(line_no_) + ": " + msg);
  }

  static void strip_comment(std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.resize(i);
        return;
      }
    }
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  TomlValue parse_value(const std::string& raw) const {
    if (raw.empty()) fail("missing value");
    TomlValue v;
    if (raw == "true" || raw == "false") {
      v.kind = TomlValue::Kind::Bool;
      v.boolean = raw == "true";
      return v;
    }
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"') fail("unterminated string");
      v.kind = TomlValue::Kind::String;
      v.text = raw.substr(1, raw.size() - 2);
      return v;
    }
    if (raw.front() == '[') {
      return parse_array(raw);
    }
    try {
      std::size_t used = 0;
      v.number = std::stod(raw, &used);
      if (used != raw.size() || !std::isfinite(v.number)) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
      fail("cannot parse value '" + raw + "'");
    }
    v.kind = TomlValue::Kind::Number;
    return v;
  }

  TomlValue parse_array(const std::string& raw) const {
    if (raw.back() != ']') fail("unterminated array");
    const std::string body = raw.substr(1, raw.size() - 2);
    TomlValue v;
    // nested array of string arrays?
    if (body.find('[') != std::string::npos) {
      v.kind = TomlValue::Kind::NestedStringArray;
      std::size_t i = 0;
      while (i < body.size()) {
        while (i < body.size() && (body[i] == ' ' || body[i] == ',' || body[i] == '\t')) ++i;
        if (i >= body.size()) break;
        if (body[i] != '[') fail("expected nested array");
        const auto close = body.find(']', i);
        if (close == std::string::npos) fail("unterminated nested array");
        v.nested.push_back(split_strings(body.substr(i + 1, close - i - 1)));
        i = close + 1;
      }
      return v;
    }
    v.kind = TomlValue::Kind::StringArray;
    v.strings = split_strings(body);
    return v;
  }

  std::vector<std::string> split_strings(const std::string& body) const {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && (body[i] == ' ' || body[i] == ',' || body[i] == '\t')) ++i;
      if (i >= body.size()) break;
      if (body[i] != '"') fail("array elements must be quoted strings");
      const auto close = body.find('"', i + 1);
      if (close == std::string::npos) fail("unterminated string in array");
      out.push_back(body.substr(i + 1, close - i - 1));
      i = close + 1;
    }
    return out;
  }

  std::istringstream in_;
  int line_no_ = 0;
};

double want_number(const TomlValue& v, const std::string& where) {
  if (v.kind != TomlValue::Kind::Number) raise(Errc::BadConfig, where + " must be a number");
  return v.number;
}

std::int64_t want_int(const TomlValue& v, const std::string& where) {
  const double d = want_number(v, where);
  if (d != std::floor(d)) raise(Errc::BadConfig, where + " must be an integer");
  return static_cast<std::int64_t>(d);
}

}  // namespace

Config parse_config(const std::string& text) {
  Config cfg;
  TomlParser parser(text);
  const auto sections = parser.parse();
  for (const auto& [section, entries] : sections) {
    if (section == "operator") {
      for (const auto& [key, value] : entries) {
        const std::string where = "operator." + key;
        if (key == "delta_frac") cfg.op.delta_frac = want_number(value, where);
        else if (key == "delta") cfg.op.delta_abs = want_int(value, where);
        else if (key == "kappa") cfg.op.kappa = want_number(value, where);
        else if (key == "sigma_frac") cfg.op.sigma_frac = want_number(value, where);
        else if (key == "sigma") cfg.op.sigma_abs = want_number(value, where);
        else if (key == "epsilon") cfg.op.epsilon = want_int(value, where);
        else if (key == "compactness_tolerance") cfg.op.compactness_abs = want_int(value, where);
        else raise(Errc::BadConfig, "unknown key '" + where + "'");
      }
    } else if (section == "search") {
      for (const auto& [key, value] : entries) {
        const std::string where = "search." + key;
        if (key == "beam_width") cfg.search.beam_width = static_cast<int>(want_int(value, where));
        else if (key == "exhaustive_budget")
          cfg.search.exhaustive_budget = static_cast<std::uint64_t>(want_int(value, where));
        else if (key == "refine_frac") cfg.search.refine_frac = want_number(value, where);
        else if (key == "max_candidates")
          cfg.candidates.max_candidates = static_cast<int>(want_int(value, where));
        else if (key == "span_limit_frac") cfg.candidates.span_limit_frac = want_number(value, where);
        else if (key == "breakpoint_beta") cfg.candidates.breakpoint_beta = want_number(value, where);
        else if (key == "max_breakpoints")
          cfg.candidates.max_breakpoints = static_cast<int>(want_int(value, where));
        else if (key == "min_candidate_len") cfg.candidates.min_len = want_int(value, where);
        else if (key == "min_candidate_len_frac")
          cfg.candidates.min_len_frac = want_number(value, where);
        else raise(Errc::BadConfig, "unknown key '" + where + "'");
      }
    } else if (section == "detector") {
      for (const auto& [key, value] : entries) {
        const std::string where = "detector." + key;
        if (key == "min_confidence") cfg.detector.min_confidence = want_number(value, where);
        else if (key == "nms_iou") cfg.detector.nms_iou = want_number(value, where);
        else if (key == "exclusive") {
          if (value.kind == TomlValue::Kind::NestedStringArray) {
            cfg.detector.exclusive_groups = value.nested;
          } else if (value.kind == TomlValue::Kind::StringArray) {
            cfg.detector.exclusive_groups = {value.strings};
          } else {
            raise(Errc::BadConfig, where + " must be an array of event types");
          }
        } else {
          raise(Errc::BadConfig, "unknown key '" + where + "'");
        }
      }
    } else if (section == "synthetic") {
      for (const auto& [key, value] : entries) {
        const std::string where = "synthetic." + key;
        if (key == "seed") cfg.synthetic.seed = static_cast<std::uint64_t>(want_int(value, where));
        else if (key == "n_frames") cfg.synthetic.n_frames = static_cast<int>(want_int(value, where));
        else if (key == "noise") cfg.synthetic.noise = want_number(value, where);
        else if (key == "lost_seal_fraction")
          cfg.synthetic.lost_seal_fraction = want_number(value, where);
        else if (key == "len_log_mean") cfg.synthetic.len_log_mean = want_number(value, where);
        else if (key == "len_log_std") cfg.synthetic.len_log_std = want_number(value, where);
        else if (key == "min_length") cfg.synthetic.min_length = want_int(value, where);
        else if (key == "max_length") cfg.synthetic.max_length = want_int(value, where);
        else raise(Errc::BadConfig, "unknown key '" + where + "'");
      }
    } else if (section.rfind("predicates.", 0) == 0) {
      const std::string pred = section.substr(std::string("predicates.").size());
      for (const auto& [key, value] : entries) {
        cfg.predicate_overrides[pred][key] = want_number(value, section + "." + key);
      }
    } else {
      raise(Errc::BadConfig, "unknown section '[" + section + "]'");
    }
  }
  cfg.registry();  // validates predicate overrides
  if (cfg.detector.min_confidence < 0.0 || cfg.detector.min_confidence > 1.0) {
    raise(Errc::BadConfig, "detector.min_confidence must be in [0,1]");
  }
  if (cfg.detector.nms_iou < 0.0 || cfg.detector.nms_iou > 1.0) {
    raise(Errc::BadConfig, "detector.nms_iou must be in [0,1]");
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string default_config_text() {
  return R"([operator]
delta_frac = 0.05            # SEQ gap bound as a fraction of T
kappa = 0.25                 # SYNC/OR alignment tolerance
sigma_frac = 0.05            # GUARD spill temperature as a fraction of T
epsilon = 1                  # collision nullity threshold (samples)

[search]
beam_width = 32
exhaustive_budget = 1000000
refine_frac = 0.02
max_candidates = 64
span_limit_frac = 0.8
breakpoint_beta = 3.0
max_breakpoints = 24
min_candidate_len = 8
min_candidate_len_frac = 0.02

[detector]
min_confidence = 0.3
nms_iou = 0.5
exclusive = [["valid_test", "lost_seal"]]

[synthetic]
seed = 7
n_frames = 48
noise = 0.05
lost_seal_fraction = 0.25
)";
}

}  // namespace elt
