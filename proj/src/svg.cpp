#include "elt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace elt {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c); break;
    }
  }
  return out;
}

const char* kSeriesColors[] = {"#1f6fb2", "#c05020", "#3a8a3a", "#7a4fa0", "#a08020"};

struct TreeLayout {
  double x = 0.0;
  double y = 0.0;
};

int tree_depth(const InstanceNode& node) {
  int depth = 1;
  for (const auto& child : node.children) depth = std::max(depth, 1 + tree_depth(child));
  return depth;
}

double find_x(const std::vector<std::pair<const InstanceNode*, TreeLayout>>& out,
              const InstanceNode* node) {
  for (const auto& [ptr, pos] : out) {
    if (ptr == node) return pos.x;
  }
  return 0.0;
}

void layout_tree(const InstanceNode& node, int depth, double row_height,
                 std::vector<std::pair<const InstanceNode*, TreeLayout>>& out, double& next_leaf_x,
                 double leaf_step) {
  TreeLayout pos;
  pos.y = 24.0 + static_cast<double>(depth) * row_height;
  if (node.children.empty()) {
    pos.x = next_leaf_x;
    next_leaf_x += leaf_step;
  } else {
    for (const auto& child : node.children) {
      layout_tree(child, depth + 1, row_height, out, next_leaf_x, leaf_step);
    }
    const double first = find_x(out, &node.children.front());
    const double last = find_x(out, &node.children.back());
    pos.x = (first + last) / 2.0;
  }
  out.emplace_back(&node, pos);
}

std::string node_label(const InstanceNode& node) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", node.mu);
  if (node.is_primitive()) {
    return node.schema->predicate.name + "@" + node.schema->channel + " mu=" + buf;
  }
  return std::string(op_name(node.schema->op)) + " mu=" + buf;
}

}  // namespace

std::string render_svg(const SeriesFrame& frame, const std::vector<Detection>& detections,
                       const SvgOptions& options) {
  const std::int64_t T = frame.length();
  const int margin = 40;
  const int gap = 16;
  const std::size_t n_channels = frame.channel_count();
  const std::size_t n_trees = std::min(options.max_trees, detections.size());

  const int plot_height =
      static_cast<int>(n_channels) * (options.panel_height + gap) - gap;
  const int tree_block = 170;
  const int trees_height = n_trees == 0 ? 0 : static_cast<int>(n_trees) * tree_block;
  const int height = 2 * margin + std::max(plot_height, trees_height);
  const int width = 2 * margin + options.plot_width + (n_trees > 0 ? options.tree_width + gap : 0);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" font-family=\"monospace\" font-size=\"11\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
         std::to_string(height) + "\" fill=\"#ffffff\"/>\n";

  const double x_scale = static_cast<double>(options.plot_width) / static_cast<double>(T - 1);
  auto map_x = [&](double t) { return margin + t * x_scale; };

  // shaded detection intervals span all panels
  for (const auto& det : detections) {
    const double x0 = map_x(static_cast<double>(det.interval.on));
    const double x1 = map_x(static_cast<double>(det.interval.off - 1));
    svg += "<rect class=\"detection\" x=\"" + fmt(x0) + "\" y=\"" + std::to_string(margin) +
           "\" width=\"" + fmt(std::max(1.0, x1 - x0)) + "\" height=\"" +
           std::to_string(plot_height) + "\" fill=\"#f3c96a\" fill-opacity=\"0.35\"/>\n";
  }

  for (std::size_t c = 0; c < n_channels; ++c) {
    const auto& values = frame.channel(c);
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    const double range = (hi - lo) == 0.0 ? 1.0 : hi - lo;
    const int top = margin + static_cast<int>(c) * (options.panel_height + gap);
    auto map_y = [&](double v) {
      return static_cast<double>(top) +
             (1.0 - (v - lo) / range) * static_cast<double>(options.panel_height);
    };

    svg += "<rect x=\"" + std::to_string(margin) + "\" y=\"" + std::to_string(top) +
           "\" width=\"" + std::to_string(options.plot_width) + "\" height=\"" +
           std::to_string(options.panel_height) + "\" fill=\"none\" stroke=\"#888888\"/>\n";
    svg += "<text x=\"" + std::to_string(margin) + "\" y=\"" + std::to_string(top - 4) + "\">" +
           xml_escape(frame.channels()[c]) + "</text>\n";

    // decimate long series for readable files; extrema-preserving per bucket
    svg += "<polyline fill=\"none\" stroke=\"" +
           std::string(kSeriesColors[c % 5]) + "\" stroke-width=\"1\" points=\"";
    const std::int64_t max_points = 2000;
    const std::int64_t step = std::max<std::int64_t>(1, T / max_points);
    for (std::int64_t t = 0; t < T; t += step) {
      const std::int64_t end = std::min(T, t + step);
      double v_min = values[static_cast<std::size_t>(t)];
      double v_max = v_min;
      for (std::int64_t i = t; i < end; ++i) {
        v_min = std::min(v_min, values[static_cast<std::size_t>(i)]);
        v_max = std::max(v_max, values[static_cast<std::size_t>(i)]);
      }
      svg += fmt(map_x(static_cast<double>(t))) + "," + fmt(map_y(v_min)) + " ";
      if (v_max != v_min) {
        svg += fmt(map_x(static_cast<double>(t))) + "," + fmt(map_y(v_max)) + " ";
      }
    }
    svg += "\"/>\n";
  }

  // explanation trees
  const int tree_x0 = margin + options.plot_width + gap;
  for (std::size_t d = 0; d < n_trees; ++d) {
    const auto& det = detections[d];
    const int top = margin + static_cast<int>(d) * tree_block;
    svg += "<g class=\"tree\" transform=\"translate(" + std::to_string(tree_x0) + "," +
           std::to_string(top) + ")\">\n";
    char head[160];
    std::snprintf(head, sizeof(head), "%s [%lld, %lld) conf=%.3f", det.event_type.c_str(),
                  static_cast<long long>(det.interval.on), static_cast<long long>(det.interval.off),
                  det.confidence);
    svg += "<text x=\"0\" y=\"12\">" + xml_escape(head) + "</text>\n";
    if (det.explanation) {
      std::vector<std::pair<const InstanceNode*, TreeLayout>> layout;
      const auto leaves = schema_leaves(det.explanation->schema->root);
      const double leaf_step =
          static_cast<double>(options.tree_width - 40) /
          static_cast<double>(std::max<std::size_t>(1, leaves.size()));
      double next_leaf_x = 30.0;
      const double row_height = 120.0 / static_cast<double>(tree_depth(det.explanation->root));
      layout_tree(det.explanation->root, 0, row_height, layout, next_leaf_x, leaf_step);
      for (const auto& [node, pos] : layout) {
        for (const auto& child : node->children) {
          const double cx = find_x(layout, &child);
          double cy = 0.0;
          for (const auto& [ptr, p] : layout) {
            if (ptr == &child) cy = p.y;
          }
          svg += "<line x1=\"" + fmt(pos.x) + "\" y1=\"" + fmt(pos.y) + "\" x2=\"" + fmt(cx) +
                 "\" y2=\"" + fmt(cy) + "\" stroke=\"#666666\"/>\n";
        }
      }
      for (const auto& [node, pos] : layout) {
        svg += "<circle cx=\"" + fmt(pos.x) + "\" cy=\"" + fmt(pos.y) +
               "\" r=\"3\" fill=\"#333333\"/>\n";
        svg += "<text x=\"" + fmt(pos.x + 6.0) + "\" y=\"" + fmt(pos.y - 4.0) + "\">" +
               xml_escape(node_label(*node)) + "</text>\n";
      }
    }
    svg += "</g>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace elt
