#include "elt/detector.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <set>

#include "elt/candidates.hpp"
#include "elt/errors.hpp"
#include "elt/search.hpp"

namespace elt {

namespace {

constexpr std::int64_t kMinWindow = 32;
constexpr std::int64_t kEdgeMargin = 2;

std::vector<Interval> scan_windows(std::int64_t T) {
  std::vector<Interval> windows;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  auto push = [&](std::int64_t on, std::int64_t off) {
    if (seen.insert({on, off}).second) windows.emplace_back(on, off);
  };
  push(0, T);
  for (std::int64_t div : {2, 4}) {
    const std::int64_t w = T / div;
    if (w < kMinWindow) continue;
    const std::int64_t stride = std::max<std::int64_t>(1, w / 2);
    for (std::int64_t start = 0; start + w <= T; start += stride) push(start, start + w);
    if ((T - w) % stride != 0) push(T - w, T);
  }
  return windows;
}

void shift_instances(InstanceNode& node, std::int64_t offset) {
  node.interval = Interval(node.interval.on + offset, node.interval.off + offset);
  for (auto& child : node.children) shift_instances(child, offset);
}

bool touches_window_edge(const Interval& found, const Interval& window, std::int64_t T) {
  const bool left_interior = window.on > 0;
  const bool right_interior = window.off < T;
  if (left_interior && found.on - window.on <= kEdgeMargin) return true;
  if (right_interior && window.off - found.off <= kEdgeMargin) return true;
  return false;
}

}  // namespace

std::vector<Detection> detect(const SeriesFrame& frame, const EventCatalog& catalog,
                              const Config& config, std::ostream* search_trace) {
  if (catalog.schemas.empty()) raise(Errc::EmptyCatalog, "catalog has no schemas");
  for (const auto& [event_type, schema] : catalog.schemas) {
    for (const auto& channel : schema.declared_channels()) {
      if (!frame.has_channel(channel)) {
        raise(Errc::ChannelMismatch,
              "schema \"" + event_type + "\" needs channel '" + channel + "'");
      }
    }
  }

  const PredicateRegistry registry = config.registry();
  const std::int64_t T = frame.length();
  const auto windows = scan_windows(T);

  // Window searches keep the whole-frame candidate length floor so smaller
  // windows cannot introduce sliver instantiations.
  CandidateGenConfig cand_cfg = config.candidates;
  cand_cfg.min_len = cand_cfg.min_candidate_len(T);

  std::vector<Detection> raw;
  for (const auto& [event_type, schema] : catalog.schemas) {
    auto shared_schema = std::make_shared<const SchemaTree>(schema);
    for (const Interval& window : windows) {
      const bool whole_frame = window.on == 0 && window.off == T;
      const SeriesFrame sub = whole_frame ? frame : frame.slice(window);
      const OperatorParams params = config.op.resolve(sub.length());

      const CandidateSet candidates =
          generate_candidates(sub, schema, cand_cfg, registry);
      SearchResult result = instantiate_beam(shared_schema, candidates, params,
                                             config.search.beam_width, search_trace);
      // Instantiations truncated by an interior window edge are artifacts of
      // the scan; a larger window covers the same event untruncated.
      if (!whole_frame && touches_window_edge(
                              Interval(result.best.root.interval.on + window.on,
                                       result.best.root.interval.off + window.on),
                              window, T)) {
        continue;
      }
      RefineConfig refine;
      refine.radius_frac = config.search.refine_frac;
      refine.min_len = cand_cfg.min_candidate_len(sub.length());
      result = refine_boundaries(sub, result, params, refine, registry);
      if (result.root_score < config.detector.min_confidence) continue;

      Detection det;
      det.event_type = event_type;
      det.confidence = result.root_score;
      InstanceTree explanation = result.best;
      if (!whole_frame) shift_instances(explanation.root, window.on);
      det.interval = explanation.root.interval;
      det.explanation = std::move(explanation);
      raw.push_back(std::move(det));
    }
  }

  // Greedy non-max suppression, confidence-descending.
  std::sort(raw.begin(), raw.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.interval.on != b.interval.on) return a.interval.on < b.interval.on;
    if (a.interval.off != b.interval.off) return a.interval.off < b.interval.off;
    return a.event_type < b.event_type;
  });

  auto exclusive = [&](const std::string& a, const std::string& b) {
    if (a == b) return true;
    for (const auto& group : config.detector.exclusive_groups) {
      const bool has_a = std::find(group.begin(), group.end(), a) != group.end();
      const bool has_b = std::find(group.begin(), group.end(), b) != group.end();
      if (has_a && has_b) return true;
    }
    return false;
  };

  std::vector<Detection> kept;
  for (auto& candidate : raw) {
    bool suppressed = false;
    for (const auto& keeper : kept) {
      if (exclusive(candidate.event_type, keeper.event_type) &&
          iou(candidate.interval, keeper.interval) > config.detector.nms_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(std::move(candidate));
  }

  std::sort(kept.begin(), kept.end(), [](const Detection& a, const Detection& b) {
    if (a.interval.on != b.interval.on) return a.interval.on < b.interval.on;
    if (a.interval.off != b.interval.off) return a.interval.off < b.interval.off;
    return a.event_type < b.event_type;
  });
  return kept;
}

}  // namespace elt
