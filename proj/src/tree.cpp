#include "panelclust/tree.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <unordered_map>

#include "disjoint_sets.hpp"
#include "panelclust/error.hpp"

namespace panelclust {
namespace {

void require_labels(const MergeTree& tree, std::size_t count) {
  if (count != tree.leaves()) {
    throw Error("tree has " + std::to_string(tree.leaves()) + " leaves but " +
                std::to_string(count) + " labels were given");
  }
}

std::string format_length(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool newick_reserved(char c) {
  switch (c) {
    case '(': case ')': case '[': case ']': case '\'': case ':': case ';': case ',':
    case ' ': case '\t':
      return true;
    default:
      return false;
  }
}

std::string newick_label(const std::string& label, bool quote) {
  if (label.empty()) throw Error("empty label cannot be written to Newick");
  for (char c : label) {
    if (static_cast<unsigned char>(c) < 0x20) throw Error("label '" + label + "' contains a control character");
  }
  if (std::none_of(label.begin(), label.end(), newick_reserved)) return label;
  if (!quote) throw Error("label '" + label + "' needs Newick quoting");
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

void write_newick(const MergeTree& tree, std::span<const std::string> labels,
                  const std::vector<std::size_t>& lowest, bool quote, std::size_t node,
                  std::string& out) {
  if (tree.is_leaf(node)) {
    out += newick_label(labels[node], quote);
    return;
  }
  const Merge& m = tree.merge_of(node);
  std::size_t first = m.left, second = m.right;
  if (lowest[second] < lowest[first]) std::swap(first, second);
  out += '(';
  write_newick(tree, labels, lowest, quote, first, out);
  out += ':' + format_length(m.height - tree.height(first)) + ',';
  write_newick(tree, labels, lowest, quote, second, out);
  out += ':' + format_length(m.height - tree.height(second)) + ')';
}

}  // namespace

ClusterAssignment::ClusterAssignment(std::vector<std::string> labels,
                                     std::vector<std::size_t> cluster_of)
    : labels_(std::move(labels)), cluster_of_(std::move(cluster_of)) {
  if (labels_.empty()) throw Error("assignment needs at least one entity");
  if (labels_.size() != cluster_of_.size()) throw Error("assignment label/cluster count mismatch");
  k_ = *std::max_element(cluster_of_.begin(), cluster_of_.end()) + 1;
  std::vector<bool> seen(k_, false);
  for (std::size_t c : cluster_of_) seen[c] = true;
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error("cluster ids must cover 0..k-1 without empty clusters");
  }
}

ClusterAssignment ClusterAssignment::canonical(std::vector<std::string> labels,
                                               std::span<const std::size_t> groups) {
  std::unordered_map<std::size_t, std::size_t> id_of;
  std::vector<std::size_t> cluster_of;
  cluster_of.reserve(groups.size());
  for (std::size_t g : groups) cluster_of.push_back(id_of.emplace(g, id_of.size()).first->second);
  return ClusterAssignment(std::move(labels), std::move(cluster_of));
}

std::vector<std::size_t> ClusterAssignment::members(std::size_t cluster) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cluster_of_.size(); ++i) {
    if (cluster_of_[i] == cluster) out.push_back(i);
  }
  return out;
}

bool ClusterAssignment::is_canonical() const {
  std::size_t next = 0;
  for (std::size_t c : cluster_of_) {
    if (c > next) return false;
    if (c == next) ++next;
  }
  return true;
}

bool ClusterAssignment::same_partition(const ClusterAssignment& other) const {
  return labels_ == other.labels_ &&
         canonical(labels_, cluster_of_).cluster_of_ == canonical(labels_, other.cluster_of_).cluster_of_;
}

ClusterAssignment cut_by_count(const MergeTree& tree, std::vector<std::string> labels, std::size_t k) {
  const std::size_t n = tree.leaves();
  require_labels(tree, labels.size());
  if (k < 1 || k > n) {
    throw Error("cluster count " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  DisjointSets sets(n);
  std::vector<std::size_t> representative(tree.node_count());
  std::iota(representative.begin(), representative.begin() + static_cast<std::ptrdiff_t>(n), 0);
  for (std::size_t step = 0; step < n - k; ++step) {
    const Merge& m = tree.merges()[step];
    sets.unite(representative[m.left], representative[m.right]);
    representative[n + step] = representative[m.left];
  }
  std::vector<std::size_t> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[i] = sets.find(i);
  return ClusterAssignment::canonical(std::move(labels), groups);
}

ClusterAssignment cut_by_height(const MergeTree& tree, std::vector<std::string> labels, double h) {
  if (!(h >= 0.0)) throw Error("cut height must be non-negative");
  const auto& merges = tree.merges();
  auto kept = std::partition_point(merges.begin(), merges.end(),
                                   [h](const Merge& m) { return m.height <= h; }) -
              merges.begin();
  return cut_by_count(tree, std::move(labels), tree.leaves() - static_cast<std::size_t>(kept));
}

ClusterAssignment relabel_by_score_desc(const ClusterAssignment& assignment,
                                        std::span<const double> scores) {
  if (scores.size() != assignment.size()) throw Error("score count does not match assignment");
  std::vector<double> sum(assignment.k(), 0.0);
  std::vector<double> count(assignment.k(), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sum[assignment.cluster_of(i)] += scores[i];
    count[assignment.cluster_of(i)] += 1.0;
  }
  std::vector<std::size_t> order(assignment.k());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sum[a] / count[a] > sum[b] / count[b];
  });
  std::vector<std::size_t> new_id(assignment.k());
  for (std::size_t rank = 0; rank < order.size(); ++rank) new_id[order[rank]] = rank;
  std::vector<std::size_t> cluster_of;
  for (std::size_t c : assignment.cluster_of()) cluster_of.push_back(new_id[c]);
  return ClusterAssignment(assignment.labels(), std::move(cluster_of));
}

std::string to_newick(const MergeTree& tree, std::span<const std::string> labels, NewickOptions options) {
  require_labels(tree, labels.size());
  std::string out;
  write_newick(tree, labels, tree.min_leaves(), options.quote_labels, tree.root(), out);
  return out + ';';
}

nlohmann::json assignment_to_json(const ClusterAssignment& assignment) {
  nlohmann::json clusters = nlohmann::json::array();
  for (std::size_t c = 0; c < assignment.k(); ++c) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t i : assignment.members(c)) members.push_back(assignment.labels()[i]);
    clusters.push_back({{"id", c}, {"members", std::move(members)}});
  }
  return {{"schema_version", 1}, {"k", assignment.k()}, {"clusters", std::move(clusters)}};
}

ClusterAssignment assignment_from_json(const nlohmann::json& doc, const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cluster_of(labels.size(), unassigned);
  try {
    for (const auto& cluster : doc.at("clusters")) {
      auto id = cluster.at("id").get<std::size_t>();
      for (const auto& member : cluster.at("members")) {
        auto name = member.get<std::string>();
        auto it = index.find(name);
        if (it == index.end()) throw Error("assignment names unknown entity '" + name + "'");
        if (cluster_of[it->second] != unassigned) throw Error("entity '" + name + "' assigned twice");
        cluster_of[it->second] = id;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed assignment document: ") + e.what());
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (cluster_of[i] == unassigned) throw Error("entity '" + labels[i] + "' has no cluster");
  }
  ClusterAssignment assignment(labels, std::move(cluster_of));
  if (doc.contains("k") && doc["k"].get<std::size_t>() != assignment.k()) {
    throw Error("assignment declares k=" + doc["k"].dump() + " but lists " +
                std::to_string(assignment.k()) + " clusters");
  }
  return assignment;
}

}  // namespace panelclust
