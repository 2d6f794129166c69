#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "panelclust/distance.hpp"

namespace panelclust {

enum class Linkage {
  average,   // UPGMA
  complete,
  single,
  ward,      // squared-distance update, square-rooted heights ("ward.D2")
  ward_d1,   // same coefficients applied to plain distances ("ward.D")
};

Linkage parse_linkage(std::string_view name);
std::string_view to_string(Linkage method);

/// One agglomeration step. Node ids 0..n-1 are leaves; merge k creates node
/// n + k. `left` is always the smaller of the two child ids.
struct Merge {
  std::size_t left;
  std::size_t right;
  double height;
  std::size_t size;

  bool operator==(const Merge&) const = default;
};

/// Ordered sequence of n-1 merges. Validated on construction: every node
/// except the root is consumed exactly once, children exist before they are
/// merged, sizes add up, and heights are finite, non-negative and
/// non-decreasing.
class MergeTree {
 public:
  MergeTree(std::size_t leaves, std::vector<Merge> merges);

  std::size_t leaves() const { return leaves_; }
  const std::vector<Merge>& merges() const { return merges_; }
  std::size_t root() const { return 2 * leaves_ - 2; }
  std::size_t node_count() const { return 2 * leaves_ - 1; }

  bool is_leaf(std::size_t node) const { return node < leaves_; }
  const Merge& merge_of(std::size_t node) const { return merges_[node - leaves_]; }
  double height(std::size_t node) const { return is_leaf(node) ? 0.0 : merge_of(node).height; }
  std::size_t cluster_size(std::size_t node) const {
    return is_leaf(node) ? 1 : merge_of(node).size;
  }

  /// Smallest leaf index below `node`, for every node id.
  std::vector<std::size_t> min_leaves() const;

  bool operator==(const MergeTree&) const = default;

 private:
  std::size_t leaves_;
  std::vector<Merge> merges_;
};

/// Agglomerative clustering by the nearest-neighbor chain algorithm with
/// Lance-Williams updates. O(n^2) time, one working copy of the condensed
/// matrix. Equal-height merges are sequenced by smallest child id.
MergeTree agglomerate(const DistanceMatrix& distances, Linkage method = Linkage::average);

/// Literal O(n^3) reference: every step recomputes all inter-cluster
/// distances from the original matrix and merges the global minimum
/// (ties: smaller id least, then larger id least). Refuses n > max_n.
MergeTree naive_linkage_oracle(const DistanceMatrix& distances, Linkage method,
                               std::size_t max_n = 64);

/// Height of the lowest merge joining each pair of leaves.
DistanceMatrix cophenetic(const MergeTree& tree, std::vector<std::string> labels = {});

/// One `left right height size` line per merge, height with 17 significant digits.
void write_merge_dump(std::ostream& out, const MergeTree& tree);
MergeTree read_merge_dump(std::istream& in);

}  // namespace panelclust
