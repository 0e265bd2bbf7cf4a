#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "elt/config.hpp"
#include "elt/logic.hpp"
#include "elt/schema.hpp"
#include "elt/series.hpp"

namespace elt {

/// One detected event instance. confidence equals the root score of the
/// explanation tree (when present; baselines emit explanation-free
/// detections).
struct Detection {
  Interval interval{};
  std::string event_type;
  double confidence = 0.0;
  std::optional<InstanceTree> explanation;
};

/// Scans a frame against every schema in the catalog: beam instantiation on
/// the full frame and on half-overlapping windows of sizes {T, T/2, T/4},
/// boundary refinement, a confidence threshold, and greedy non-max
/// suppression (within each event type, and across types inside declared
/// exclusivity groups). Deterministic for fixed inputs and config. When
/// `search_trace` is set, scored assignments stream to it as JSON lines.
std::vector<Detection> detect(const SeriesFrame& frame, const EventCatalog& catalog,
                              const Config& config, std::ostream* search_trace = nullptr);

}  // namespace elt
