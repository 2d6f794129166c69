#include "panelclust/render.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "panelclust/error.hpp"

namespace panelclust {
namespace {

std::string num(double v) {
  if (std::abs(v) < 0.0005) v = 0.0;  // no "-0.000"
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string line(double x1, double y1, double x2, double y2) {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\"/>\n";
}

// Per-node layout coordinate: leaf position (0..n-1) for leaves, midpoint of
// the two children for merges.
std::vector<double> node_slots(const MergeTree& tree, const std::vector<std::size_t>& order) {
  std::vector<double> slot(tree.node_count(), 0.0);
  for (std::size_t p = 0; p < order.size(); ++p) slot[order[p]] = static_cast<double>(p);
  for (std::size_t k = 0; k < tree.merges().size(); ++k) {
    const Merge& m = tree.merges()[k];
    slot[tree.leaves() + k] = (slot[m.left] + slot[m.right]) / 2.0;
  }
  return slot;
}

// Leaf positions p where leaves p and p+1 (mod n) sit in different clusters.
std::vector<std::size_t> boundaries(const ClusterAssignment& assignment,
                                    const std::vector<std::size_t>& order, bool wrap) {
  std::vector<std::size_t> out;
  const std::size_t n = order.size();
  for (std::size_t p = 0; p + (wrap ? 0 : 1) < n; ++p) {
    if (assignment.cluster_of(order[p]) != assignment.cluster_of(order[(p + 1) % n])) out.push_back(p);
  }
  return out;
}

struct Document {
  std::string branches, separators, labels;
};

Document rectangular(const MergeTree& tree, std::span<const std::string> labels,
                     const ClusterAssignment* assignment, const LayoutSpec& spec,
                     const std::vector<std::size_t>& order) {
  constexpr double margin = 20.0;
  const double n = static_cast<double>(tree.leaves());
  const double top = margin, bottom = spec.height - spec.label_margin;
  const double step = (spec.width - 2.0 * margin) / n;
  if (bottom <= top || step <= 0.0) throw Error("canvas too small for a rectangular layout");
  const double root = tree.height(tree.root());
  const auto slot = node_slots(tree, order);
  auto x_of = [&](std::size_t node) { return margin + (slot[node] + 0.5) * step; };
  auto y_of = [&](std::size_t node) {
    return bottom - (root > 0.0 ? tree.height(node) / root : 0.0) * (bottom - top);
  };

  Document doc;
  for (std::size_t k = 0; k < tree.merges().size(); ++k) {
    const Merge& m = tree.merges()[k];
    const double py = y_of(tree.leaves() + k);
    doc.branches += line(x_of(m.left), y_of(m.left), x_of(m.left), py);
    doc.branches += line(x_of(m.right), y_of(m.right), x_of(m.right), py);
    doc.branches += line(x_of(m.left), py, x_of(m.right), py);
  }
  if (assignment && spec.separators) {
    for (std::size_t p : boundaries(*assignment, order, false)) {
      const double x = margin + static_cast<double>(p + 1) * step;
      doc.separators += line(x, top, x, spec.height - margin);
    }
  }
  for (std::size_t p = 0; p < order.size(); ++p) {
    const double x = margin + (static_cast<double>(p) + 0.5) * step, y = bottom + 4.0;
    doc.labels += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" transform=\"rotate(90 " + num(x) + " " +
                  num(y) + ")\" dominant-baseline=\"middle\">" + xml_escape(labels[order[p]]) + "</text>\n";
  }
  return doc;
}

Document radial(const MergeTree& tree, std::span<const std::string> labels,
                const ClusterAssignment* assignment, const LayoutSpec& spec,
                const std::vector<std::size_t>& order) {
  const double cx = spec.width / 2.0, cy = spec.height / 2.0;
  const double outer = std::min(spec.width, spec.height) / 2.0;
  const double ring = outer - spec.label_margin;
  if (ring <= 0.0) throw Error("canvas too small for a radial layout");
  const double n = static_cast<double>(tree.leaves());
  const double root = tree.height(tree.root());
  const auto slot = node_slots(tree, order);
  auto angle_of = [&](std::size_t node) { return 2.0 * std::numbers::pi * slot[node] / n; };
  auto radius_of = [&](std::size_t node) {
    return ring * (1.0 - (root > 0.0 ? tree.height(node) / root : 0.0));
  };
  auto px = [&](double r, double a) { return cx + r * std::cos(a); };
  auto py = [&](double r, double a) { return cy + r * std::sin(a); };

  Document doc;
  for (std::size_t k = 0; k < tree.merges().size(); ++k) {
    const Merge& m = tree.merges()[k];
    const double r = radius_of(tree.leaves() + k);
    for (std::size_t child : {m.left, m.right}) {
      const double a = angle_of(child), rc = radius_of(child);
      doc.branches += line(px(rc, a), py(rc, a), px(r, a), py(r, a));
    }
    if (r <= 0.0) continue;
    double a1 = angle_of(m.left), a2 = angle_of(m.right);
    if (a2 < a1) std::swap(a1, a2);
    doc.branches += "<path d=\"M " + num(px(r, a1)) + " " + num(py(r, a1)) + " A " + num(r) + " " + num(r) +
                    " 0 " + (a2 - a1 > std::numbers::pi ? "1" : "0") + " 1 " + num(px(r, a2)) + " " +
                    num(py(r, a2)) + "\"/>\n";
  }
  if (assignment && spec.separators) {
    for (std::size_t p : boundaries(*assignment, order, true)) {
      const double a = 2.0 * std::numbers::pi * (static_cast<double>(p) + 0.5) / n;
      doc.separators += line(cx, cy, px(outer - 5.0, a), py(outer - 5.0, a));
    }
  }
  for (std::size_t p = 0; p < order.size(); ++p) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(p) / n;
    const double x = px(ring + 4.0, a), y = py(ring + 4.0, a);
    double degrees = a * 180.0 / std::numbers::pi;
    const bool flip = std::cos(a) < -1e-9;
    if (flip) degrees = std::fmod(degrees + 180.0, 360.0);
    doc.labels += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" transform=\"rotate(" + num(degrees) + " " +
                  num(x) + " " + num(y) + ")\" text-anchor=\"" + (flip ? "end" : "start") +
                  "\" dominant-baseline=\"middle\">" + xml_escape(labels[order[p]]) + "</text>\n";
  }
  return doc;
}

}  // namespace

Layout parse_layout(std::string_view name) {
  if (name == "rectangular") return Layout::rectangular;
  if (name == "radial") return Layout::radial;
  throw Error("unknown layout '" + std::string(name) + "'");
}

std::string_view to_string(Layout layout) {
  return layout == Layout::radial ? "radial" : "rectangular";
}

std::vector<std::size_t> leaf_ordering(const MergeTree& tree) {
  const auto lowest = tree.min_leaves();
  std::vector<std::size_t> order;
  order.reserve(tree.leaves());
  std::vector<std::size_t> stack{tree.root()};
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    if (tree.is_leaf(node)) {
      order.push_back(node);
      continue;
    }
    std::size_t first = tree.merge_of(node).left, second = tree.merge_of(node).right;
    if (lowest[second] < lowest[first]) std::swap(first, second);
    stack.push_back(second);
    stack.push_back(first);
  }
  return order;
}

std::string render_dendrogram(const MergeTree& tree, std::span<const std::string> labels,
                              const ClusterAssignment* assignment, const LayoutSpec& spec) {
  if (!(spec.width > 0.0) || !(spec.height > 0.0)) throw Error("canvas dimensions must be positive");
  if (labels.size() != tree.leaves()) throw Error("label count does not match tree leaves");
  if (assignment) {
    std::vector<std::string> names(labels.begin(), labels.end());
    if (assignment->labels() != names ||
        !assignment->same_partition(cut_by_count(tree, names, assignment->k()))) {
      throw Error("cluster assignment is not a cut of this tree");
    }
  }
  const auto order = leaf_ordering(tree);
  const Document doc = spec.layout == Layout::radial ? radial(tree, labels, assignment, spec, order)
                                                     : rectangular(tree, labels, assignment, spec, order);

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(spec.width) + "\" height=\"" +
         num(spec.height) + "\" viewBox=\"0 0 " + num(spec.width) + " " + num(spec.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<g class=\"branches\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n" + doc.branches + "</g>\n";
  if (!doc.separators.empty()) {
    out += "<g class=\"separators\" stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"6 4\">\n" +
           doc.separators + "</g>\n";
  }
  out += "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"" + num(spec.font_size) + "\">\n" +
         doc.labels + "</g>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace panelclust
