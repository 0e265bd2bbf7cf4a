#include "elt/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "elt/errors.hpp"

namespace elt {

namespace {

void check_thresholds(const std::vector<double>& thresholds) {
  if (thresholds.empty()) raise(Errc::BadThreshold, "need at least one threshold");
  for (double t : thresholds) {
    if (!(t > 0.0) || t > 1.0) {
      raise(Errc::BadThreshold, "thresholds must lie in (0, 1], got " + std::to_string(t));
    }
  }
}

struct Counts {
  std::size_t predictions = 0;
  std::size_t truths = 0;
  std::vector<std::size_t> tp;  // per threshold
};

ThresholdMetrics finalize(double threshold, std::size_t tp, std::size_t predictions,
                          std::size_t truths) {
  ThresholdMetrics m;
  m.threshold = threshold;
  m.tp = tp;
  m.fp = predictions - tp;
  m.fn = truths - tp;
  m.precision = predictions == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predictions);
  m.recall = truths == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(truths);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

/// Greedy confidence-ordered matching for one frame; appends matches and
/// accumulates counts per event type.
void match_frame(std::size_t frame_idx, const std::vector<Detection>& predictions,
                 const std::vector<GroundTruthEvent>& truth,
                 const std::vector<double>& thresholds, std::map<std::string, Counts>& by_type,
                 std::vector<MatchRecord>& matches) {
  for (const auto& p : predictions) {
    auto& c = by_type[p.event_type];
    if (c.tp.empty()) c.tp.assign(thresholds.size(), 0);
    ++c.predictions;
  }
  for (const auto& t : truth) {
    auto& c = by_type[t.event_type];
    if (c.tp.empty()) c.tp.assign(thresholds.size(), 0);
    ++c.truths;
  }

  std::vector<std::size_t> order(predictions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (predictions[a].confidence != predictions[b].confidence) {
      return predictions[a].confidence > predictions[b].confidence;
    }
    if (predictions[a].interval.on != predictions[b].interval.on) {
      return predictions[a].interval.on < predictions[b].interval.on;
    }
    return a < b;
  });

  std::set<std::size_t> taken;
  for (std::size_t pi : order) {
    const Detection& pred = predictions[pi];
    double best_iou = 0.0;
    std::size_t best_truth = truth.size();
    for (std::size_t ti = 0; ti < truth.size(); ++ti) {
      if (taken.count(ti) != 0 || truth[ti].event_type != pred.event_type) continue;
      const double value = iou(pred.interval, truth[ti].interval);
      if (value > best_iou) {
        best_iou = value;
        best_truth = ti;
      }
    }
    if (best_truth == truth.size()) continue;  // nothing overlapping: prediction stays FP
    taken.insert(best_truth);
    matches.push_back({frame_idx, pi, best_truth, best_iou, pred.event_type});
    auto& c = by_type[pred.event_type];
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      if (best_iou >= thresholds[k]) ++c.tp[k];
    }
  }
}

EvalReport build_report(const std::vector<double>& thresholds,
                        const std::map<std::string, Counts>& by_type,
                        std::vector<MatchRecord> matches) {
  EvalReport report;
  report.matches = std::move(matches);
  std::size_t all_preds = 0;
  std::size_t all_truths = 0;
  std::vector<std::size_t> all_tp(thresholds.size(), 0);
  for (const auto& [event_type, counts] : by_type) {
    all_preds += counts.predictions;
    all_truths += counts.truths;
    std::vector<ThresholdMetrics> rows;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      const std::size_t tp = counts.tp.empty() ? 0 : counts.tp[k];
      all_tp[k] += tp;
      rows.push_back(finalize(thresholds[k], tp, counts.predictions, counts.truths));
    }
    report.per_type.emplace(event_type, std::move(rows));
  }
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    report.overall.push_back(finalize(thresholds[k], all_tp[k], all_preds, all_truths));
  }
  return report;
}

}  // namespace

const ThresholdMetrics& EvalReport::at_threshold(double threshold) const {
  for (const auto& m : overall) {
    if (m.threshold == threshold) return m;
  }
  raise(Errc::BadThreshold, "report has no threshold " + std::to_string(threshold));
}

EvalReport evaluate(const std::vector<Detection>& predictions,
                    const std::vector<GroundTruthEvent>& truth,
                    const std::vector<double>& thresholds) {
  check_thresholds(thresholds);
  std::map<std::string, Counts> by_type;
  std::vector<MatchRecord> matches;
  match_frame(0, predictions, truth, thresholds, by_type, matches);
  return build_report(thresholds, by_type, std::move(matches));
}

EvalReport evaluate_frames(
    const std::vector<std::pair<std::vector<Detection>, std::vector<GroundTruthEvent>>>& frames,
    const std::vector<double>& thresholds) {
  check_thresholds(thresholds);
  std::map<std::string, Counts> by_type;
  std::vector<MatchRecord> matches;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    match_frame(f, frames[f].first, frames[f].second, thresholds, by_type, matches);
  }
  return build_report(thresholds, by_type, std::move(matches));
}

std::string format_report(const EvalReport& report) {
  std::string out;
  char buf[160];
  out += "type            thr     P       R       F1      TP   FP   FN\n";
  auto row = [&](const std::string& name, const ThresholdMetrics& m) {
    std::snprintf(buf, sizeof(buf), "%-15s %-7.2f %-7.4f %-7.4f %-7.4f %-4zu %-4zu %-4zu\n",
                  name.c_str(), m.threshold, m.precision, m.recall, m.f1, m.tp, m.fp, m.fn);
    out += buf;
  };
  for (const auto& m : report.overall) row("(all)", m);
  for (const auto& [event_type, rows] : report.per_type) {
    for (const auto& m : rows) row(event_type, m);
  }
  return out;
}

}  // namespace elt
