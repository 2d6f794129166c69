#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "panelclust/linkage.hpp"
#include "panelclust/tree.hpp"

namespace panelclust {

enum class Layout { rectangular, radial };

Layout parse_layout(std::string_view name);
std::string_view to_string(Layout layout);

struct LayoutSpec {
  Layout layout = Layout::radial;
  double width = 800.0;
  double height = 800.0;
  double font_size = 10.0;
  // Room reserved for leaf labels beyond the leaf ring / baseline.
  double label_margin = 120.0;
  // Dashed boundaries between adjacent leaves of different clusters.
  bool separators = true;
};

/// Depth-first leaf order; at every merge the child holding the lowest leaf
/// index comes first. Members of any tree cut form contiguous runs.
std::vector<std::size_t> leaf_ordering(const MergeTree& tree);

/// Self-contained SVG document. Rectangular: leaves evenly spaced along x,
/// junction depth proportional to merge height. Radial: root at the centre,
/// leaves on the outer ring at angle 2*pi*i/n, node radius proportional to
/// (root height - node height). Coordinates carry three decimals.
std::string render_dendrogram(const MergeTree& tree, std::span<const std::string> labels,
                              const ClusterAssignment* assignment, const LayoutSpec& spec);

}  // namespace panelclust
