#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "panelclust/linkage.hpp"

namespace panelclust {

/// Flat partition of the entities into k non-empty clusters with ids 0..k-1.
///
/// Tree cuts produce canonical ids (cluster 0 holds entity 0, cluster 1 the
/// lowest entity outside cluster 0, ...). relabel_by_score_desc() produces a
/// report ordering instead.
class ClusterAssignment {
 public:
  ClusterAssignment(std::vector<std::string> labels, std::vector<std::size_t> cluster_of);

  /// Renumbers an arbitrary grouping into canonical ids.
  static ClusterAssignment canonical(std::vector<std::string> labels,
                                     std::span<const std::size_t> groups);

  std::size_t k() const { return k_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::size_t>& cluster_of() const { return cluster_of_; }
  std::size_t cluster_of(std::size_t entity) const { return cluster_of_[entity]; }

  /// Entity indices of one cluster, ascending.
  std::vector<std::size_t> members(std::size_t cluster) const;

  bool is_canonical() const;
  /// Same partition regardless of numbering.
  bool same_partition(const ClusterAssignment& other) const;

  bool operator==(const ClusterAssignment&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> cluster_of_;
  std::size_t k_ = 0;
};

/// Undoes the last k-1 merges.
ClusterAssignment cut_by_count(const MergeTree& tree, std::vector<std::string> labels,
                               std::size_t k);

/// Keeps exactly the merges with height <= h.
ClusterAssignment cut_by_height(const MergeTree& tree, std::vector<std::string> labels,
                                double h);

/// Renumbers clusters so that id 0 has the highest mean score.
/// Equal means keep canonical order.
ClusterAssignment relabel_by_score_desc(const ClusterAssignment& assignment,
                                        std::span<const double> scores);

struct NewickOptions {
  // Wrap labels containing reserved characters in single quotes instead of
  // rejecting them.
  bool quote_labels = false;
};

/// Rooted Newick with branch lengths (parent height - child height). At each
/// internal node the child holding the lowest leaf index is written first.
std::string to_newick(const MergeTree& tree, std::span<const std::string> labels,
                      NewickOptions options = {});

/// `{"schema_version":1,"k":..,"clusters":[{"id":..,"members":[..]}]}`
nlohmann::json assignment_to_json(const ClusterAssignment& assignment);
ClusterAssignment assignment_from_json(const nlohmann::json& doc,
                                       const std::vector<std::string>& labels);

}  // namespace panelclust
