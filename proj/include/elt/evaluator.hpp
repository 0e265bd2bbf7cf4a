#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "elt/detector.hpp"
#include "elt/series.hpp"

namespace elt {

/// One prediction <-> ground truth pairing (same event type, IoU > 0).
struct MatchRecord {
  std::size_t frame = 0;
  std::size_t prediction = 0;
  std::size_t truth = 0;
  double iou = 0.0;
  std::string event_type;
};

struct ThresholdMetrics {
  double threshold = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::vector<ThresholdMetrics> overall;                        ///< one entry per threshold
  std::map<std::string, std::vector<ThresholdMetrics>> per_type;
  std::vector<MatchRecord> matches;

  const ThresholdMetrics& at_threshold(double threshold) const;
};

/// IoU-based detection metrics. Matching is greedy per event type:
/// predictions in confidence-descending order each take the highest-IoU
/// unmatched ground truth of the same type; a match is a true positive at a
/// threshold iff its IoU reaches it. Matching itself is
/// threshold-independent.
EvalReport evaluate(const std::vector<Detection>& predictions,
                    const std::vector<GroundTruthEvent>& truth,
                    const std::vector<double>& thresholds = {0.5, 0.9});

/// Micro-averaged metrics over many (predictions, truth) frames.
EvalReport evaluate_frames(
    const std::vector<std::pair<std::vector<Detection>, std::vector<GroundTruthEvent>>>& frames,
    const std::vector<double>& thresholds = {0.5, 0.9});

std::string format_report(const EvalReport& report);

}  // namespace elt
