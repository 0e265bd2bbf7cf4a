#pragma once

#include <cstdint>
#include <vector>

#include "elt/config.hpp"
#include "elt/detector.hpp"
#include "elt/schema.hpp"
#include "elt/series.hpp"

namespace elt {

struct SyntheticFrame {
  SeriesFrame frame;
  std::vector<GroundTruthEvent> truth;
};

/// Seeded two-channel pressure/volume benchmark. Each frame plants one
/// two-phase event: a sharp pressure fall synchronized with a volume ramp,
/// followed by either a concave pressure recovery over stable volume
/// ("valid_test") or a flat low-pressure phase ("lost_seal"). Phase
/// boundaries are recorded exactly as ground truth; distractor spikes and
/// drifts live outside the event span. Bit-identical output per seed.
std::vector<SyntheticFrame> generate_synthetic(const SyntheticConfig& spec);

/// The schemas matching the planted events.
const std::string& synthetic_schema_text();
EventCatalog synthetic_catalog();

/// One uniformly random interval and event type per frame at confidence 0.5.
std::vector<std::vector<Detection>> random_baseline(const std::vector<SeriesFrame>& frames,
                                                    const EventCatalog& catalog,
                                                    std::uint64_t seed);

}  // namespace elt
