#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "elt/candidates.hpp"
#include "elt/logic.hpp"
#include "elt/predicates.hpp"
#include "elt/search.hpp"

namespace elt {

struct DetectorConfig {
  double min_confidence = 0.3;
  double nms_iou = 0.5;
  /// Event types that are mutually exclusive: suppression applies across
  /// types within a group.
  std::vector<std::vector<std::string>> exclusive_groups;
};

struct SyntheticConfig {
  std::uint64_t seed = 7;
  int n_frames = 10;
  double noise = 0.05;
  double lost_seal_fraction = 0.25;
  double len_log_mean = 7.4;  ///< lognormal location of frame length (exp(7.4) ~ 1636)
  double len_log_std = 0.35;
  std::int64_t min_length = 700;
  std::int64_t max_length = 4200;
};

struct OperatorConfig {
  double delta_frac = 0.05;         ///< SEQ gap bound as fraction of T
  std::int64_t delta_abs = -1;      ///< absolute override; -1 keeps the fraction
  double kappa = 0.25;
  double sigma_frac = 0.05;
  double sigma_abs = -1.0;
  std::int64_t epsilon = 1;
  std::int64_t compactness_abs = -1;  ///< -1 defaults to delta

  OperatorParams resolve(std::int64_t series_length) const;
};

struct SearchSettings {
  int beam_width = 32;
  std::uint64_t exhaustive_budget = 1'000'000;
  double refine_frac = 0.02;
};

/// Whole-pipeline configuration; every knob of the TOML file lives here.
struct Config {
  OperatorConfig op;
  SearchSettings search;
  CandidateGenConfig candidates;
  DetectorConfig detector;
  SyntheticConfig synthetic;
  std::map<std::string, std::map<std::string, double>> predicate_overrides;

  PredicateRegistry registry() const;
};

/// Parses the TOML-style config format: [section] headers, key = value
/// lines, numbers / booleans / strings / (nested) string arrays, and `#`
/// comments. Unknown sections or keys are rejected.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

/// Canonical rendering of the default config, used to seed config files.
std::string default_config_text();

}  // namespace elt
