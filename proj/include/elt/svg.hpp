#pragma once

#include <string>
#include <vector>

#include "elt/detector.hpp"
#include "elt/series.hpp"

namespace elt {

struct SvgOptions {
  int plot_width = 900;
  int panel_height = 160;
  int tree_width = 420;
  std::size_t max_trees = 3;  ///< explanation trees drawn beside the plot
};

/// Static visualization: stacked per-channel line plots with detection
/// intervals shaded, plus one tree diagram per detection annotated with
/// per-node mu. Output is byte-deterministic for fixed inputs.
std::string render_svg(const SeriesFrame& frame, const std::vector<Detection>& detections,
                       const SvgOptions& options = {});

}  // namespace elt
