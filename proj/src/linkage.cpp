#include "panelclust/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#if __has_include(<sys/mman.h>)
#include <sys/mman.h>
#endif

#include "disjoint_sets.hpp"
#include "panelclust/error.hpp"

namespace panelclust {
namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// Lance-Williams update: dissimilarity between cluster k and the union of a
// and b. For ward.D2 all arguments are squared distances.
double lance_williams(Linkage method, double d_ka, double d_kb, double d_ab, double size_a,
                      double size_b, double size_k) {
  switch (method) {
    case Linkage::average:
      return (size_a * d_ka + size_b * d_kb) / (size_a + size_b);
    case Linkage::complete:
      return std::max(d_ka, d_kb);
    case Linkage::single:
      return std::min(d_ka, d_kb);
    case Linkage::ward:
    case Linkage::ward_d1:
      return ((size_a + size_k) * d_ka + (size_b + size_k) * d_kb - size_k * d_ab) /
             (size_a + size_b + size_k);
  }
  return 0.0;
}

// Doubly linked list of the slots that still hold a live cluster.
class ActiveSet {
 public:
  explicit ActiveSet(std::size_t n) : next_(n), prev_(n) {
    for (std::size_t i = 0; i < n; ++i) {
      next_[i] = i + 1;
      prev_[i] = i == 0 ? npos : i - 1;
    }
  }
  std::size_t first() const { return first_; }
  std::size_t next(std::size_t i) const { return next_[i]; }
  void remove(std::size_t i) {
    if (prev_[i] == npos) {
      first_ = next_[i];
    } else {
      next_[prev_[i]] = next_[i];
    }
    if (next_[i] < next_.size()) prev_[next_[i]] = prev_[i];
  }

 private:
  std::vector<std::size_t> next_, prev_;
  std::size_t first_ = 0;
};

// Working copy of the condensed matrix. The column walks of the chain scan
// touch a new page per element, so large buffers ask for huge pages.
class WorkBuffer {
 public:
  explicit WorkBuffer(std::span<const double> source) : size_(source.size()) {
    constexpr std::size_t huge = std::size_t{1} << 21;
    const std::size_t bytes = (size_ * sizeof(double) + huge - 1) / huge * huge;
    data_.reset(static_cast<double*>(std::aligned_alloc(huge, std::max(bytes, huge))));
    if (!data_) throw std::bad_alloc();
#ifdef MADV_HUGEPAGE
    if (bytes >= huge) madvise(data_.get(), bytes, MADV_HUGEPAGE);
#endif
    std::copy(source.begin(), source.end(), data_.get());
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double* begin() { return data_.get(); }
  double* end() { return data_.get() + size_; }

 private:
  struct Free {
    void operator()(double* p) const { std::free(p); }
  };
  std::unique_ptr<double[], Free> data_;
  std::size_t size_;
};

// Merge between two slots. Slot s always contains leaf s, so the pair names
// one leaf on each side.
struct SlotMerge {
  std::size_t a;
  std::size_t b;
  double height;
};

// Converts slot merges (any dependency-respecting order) into a MergeTree.
// Merges are emitted lowest height first; equal heights go by the smaller,
// then the larger, child id. Rounding in the update formulas can put a parent
// one ulp below a child, so heights are clamped to their children.
MergeTree sequence_merges(std::size_t n, const std::vector<SlotMerge>& slot_merges) {
  struct Pending {
    std::size_t child[2];  // provisional node ids
    double height;
  };
  std::vector<Pending> pending;
  pending.reserve(slot_merges.size());
  std::vector<std::size_t> parent_of(2 * n - 1, npos);
  {
    DisjointSets sets(n);
    std::vector<std::size_t> node_of(n);
    std::iota(node_of.begin(), node_of.end(), 0);
    std::vector<double> height(2 * n - 1, 0.0);
    for (std::size_t k = 0; k < slot_merges.size(); ++k) {
      const auto& m = slot_merges[k];
      std::size_t ra = sets.find(m.a), rb = sets.find(m.b);
      std::size_t ca = node_of[ra], cb = node_of[rb];
      std::size_t id = n + k;
      height[id] = std::max({m.height, height[ca], height[cb]});
      pending.push_back({{ca, cb}, height[id]});
      parent_of[ca] = parent_of[cb] = k;
      node_of[sets.unite(ra, rb)] = id;
    }
  }

  using Key = std::tuple<double, std::size_t, std::size_t, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  std::vector<std::size_t> final_id(2 * n - 1, npos);
  std::vector<int> waiting(pending.size(), 2);
  auto resolve = [&](std::size_t node, std::size_t id) {
    final_id[node] = id;
    std::size_t p = parent_of[node];
    if (p == npos || --waiting[p] > 0) return;
    std::size_t x = final_id[pending[p].child[0]], y = final_id[pending[p].child[1]];
    ready.emplace(pending[p].height, std::min(x, y), std::max(x, y), p);
  };
  for (std::size_t leaf = 0; leaf < n; ++leaf) resolve(leaf, leaf);

  std::vector<Merge> merges;
  merges.reserve(pending.size());
  std::vector<std::size_t> sizes(2 * n - 1, 1);
  while (!ready.empty()) {
    auto [h, left, right, p] = ready.top();
    ready.pop();
    std::size_t id = n + merges.size();
    sizes[id] = sizes[left] + sizes[right];
    merges.push_back({left, right, h, sizes[id]});
    resolve(n + p, id);
  }
  return MergeTree(n, std::move(merges));
}

void require_clusterable(const DistanceMatrix& distances) {
  if (distances.size() < 2) {
    throw Error("clustering needs at least 2 entities, found " + std::to_string(distances.size()));
  }
}

}  // namespace

Linkage parse_linkage(std::string_view name) {
  if (name == "average" || name == "upgma") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  if (name == "single") return Linkage::single;
  if (name == "ward" || name == "ward-d2") return Linkage::ward;
  if (name == "ward-d1") return Linkage::ward_d1;
  throw Error("unknown linkage method '" + std::string(name) + "'");
}

std::string_view to_string(Linkage method) {
  switch (method) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
    case Linkage::ward: return "ward";
    case Linkage::ward_d1: return "ward-d1";
  }
  return "?";
}

MergeTree::MergeTree(std::size_t leaves, std::vector<Merge> merges)
    : leaves_(leaves), merges_(std::move(merges)) {
  if (leaves_ < 2) throw Error("merge tree needs at least 2 leaves");
  if (merges_.size() != leaves_ - 1) {
    throw Error("merge tree over " + std::to_string(leaves_) + " leaves needs " +
                std::to_string(leaves_ - 1) + " merges, found " + std::to_string(merges_.size()));
  }
  std::vector<bool> used(node_count(), false);
  double previous = 0.0;
  for (std::size_t k = 0; k < merges_.size(); ++k) {
    const Merge& m = merges_[k];
    const std::string where = "merge " + std::to_string(k) + ": ";
    if (m.left >= m.right) throw Error(where + "left id must be below right id");
    if (m.right >= leaves_ + k) throw Error(where + "child " + std::to_string(m.right) + " does not exist yet");
    if (used[m.left] || used[m.right]) throw Error(where + "child merged twice");
    used[m.left] = used[m.right] = true;
    if (!std::isfinite(m.height) || m.height < 0.0) throw Error(where + "height must be finite and non-negative");
    if (m.height < previous) throw Error(where + "heights must be non-decreasing");
    previous = m.height;
    if (m.size != cluster_size(m.left) + cluster_size(m.right)) throw Error(where + "size mismatch");
  }
}

std::vector<std::size_t> MergeTree::min_leaves() const {
  std::vector<std::size_t> lowest(node_count());
  std::iota(lowest.begin(), lowest.begin() + static_cast<std::ptrdiff_t>(leaves_), 0);
  for (std::size_t k = 0; k < merges_.size(); ++k) {
    lowest[leaves_ + k] = std::min(lowest[merges_[k].left], lowest[merges_[k].right]);
  }
  return lowest;
}

MergeTree agglomerate(const DistanceMatrix& distances, Linkage method) {
  require_clusterable(distances);
  const std::size_t n = distances.size();
  WorkBuffer work(distances.condensed());
  if (method == Linkage::ward) {
    for (double& d : work) d *= d;
  }
  // work[row[i] + j] holds the pair i < j (unsigned wrap-around for row[0]).
  std::vector<std::size_t> row(n);
  for (std::size_t i = 0; i < n; ++i) row[i] = DistanceMatrix::index(n, i, i + 1) - (i + 1);
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return i < j ? work[row[i] + j] : work[row[j] + i];
  };

  std::vector<double> size(n, 1.0);
  ActiveSet active(n);
  std::vector<std::size_t> chain;
  chain.reserve(n);
  std::vector<SlotMerge> slot_merges;
  slot_merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    if (chain.empty()) chain.push_back(active.first());
    std::size_t a = 0, b = 0;
    double best = 0.0;
    for (;;) {
      a = chain.back();
      // The previous chain element wins ties, which keeps the chain acyclic.
      const std::size_t previous = chain.size() >= 2 ? chain[chain.size() - 2] : npos;
      b = previous;
      best = previous == npos ? std::numeric_limits<double>::infinity() : at(a, previous);
      std::size_t i = active.first();
      for (; i < a; i = active.next(i)) {
        const double d = work[row[i] + a];
        if (d < best) {
          best = d;
          b = i;
        }
      }
      for (i = active.next(a); i < n; i = active.next(i)) {
        const double d = work[row[a] + i];
        if (d < best) {
          best = d;
          b = i;
        }
      }
      if (b == previous) break;
      chain.push_back(b);
    }
    chain.resize(chain.size() - 2);

    const std::size_t lo = std::min(a, b), hi = std::max(a, b);
    slot_merges.push_back({lo, hi, method == Linkage::ward ? std::sqrt(best) : best});

    // The union lives on in slot `hi`.
    for (std::size_t k = active.first(); k < n; k = active.next(k)) {
      if (k == lo || k == hi) continue;
      at(k, hi) = lance_williams(method, at(k, lo), at(k, hi), best, size[lo], size[hi], size[k]);
    }
    size[hi] += size[lo];
    active.remove(lo);
  }
  return sequence_merges(n, slot_merges);
}

MergeTree naive_linkage_oracle(const DistanceMatrix& distances, Linkage method, std::size_t max_n) {
  require_clusterable(distances);
  const std::size_t n = distances.size();
  if (n > max_n) {
    throw Error("oracle limited to n <= " + std::to_string(max_n) + ", got " + std::to_string(n));
  }
  // Ward's criterion in closed form over the original dissimilarities q:
  //   W(A,B) = 2|A||B|/(|A|+|B|) * (S_AB/(|A||B|) - S_AA/(2|A|^2) - S_BB/(2|B|^2))
  // with S summing q over ordered pairs. It coincides with the Lance-Williams
  // recurrence for any symmetric q (q = d^2 for ward.D2, q = d for ward.D).
  auto q = [&](std::size_t i, std::size_t j) {
    double d = distances(i, j);
    return method == Linkage::ward ? d * d : d;
  };
  auto within = [&](const std::vector<std::size_t>& a) {
    double s = 0.0;
    for (std::size_t x : a)
      for (std::size_t y : a) s += q(x, y);
    return s;
  };
  auto between = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t x : a) {
      for (std::size_t y : b) {
        double d = q(x, y);
        sum += d;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    switch (method) {
      case Linkage::average: return sum / (na * nb);
      case Linkage::complete: return hi;
      case Linkage::single: return lo;
      case Linkage::ward:
      case Linkage::ward_d1:
        return 2.0 * na * nb / (na + nb) *
               (sum / (na * nb) - within(a) / (2.0 * na * na) - within(b) / (2.0 * nb * nb));
    }
    return 0.0;
  };

  std::vector<std::vector<std::size_t>> members(2 * n - 1);
  std::vector<double> height(2 * n - 1, 0.0);
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), 0);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};

  std::vector<Merge> merges;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bp = 0, bq = 0;
    // `active` stays sorted, so strict < realizes the (smaller id, larger id)
    // tie order.
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        double d = between(members[active[x]], members[active[y]]);
        if (d < best) {
          best = d;
          bp = x;
          bq = y;
        }
      }
    }
    const std::size_t left = active[bp], right = active[bq], id = n + step;
    double h = method == Linkage::ward ? std::sqrt(std::max(best, 0.0)) : best;
    height[id] = std::max({h, height[left], height[right]});
    members[id] = members[left];
    members[id].insert(members[id].end(), members[right].begin(), members[right].end());
    merges.push_back({left, right, height[id], members[id].size()});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bq));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bp));
    active.push_back(id);
  }
  return MergeTree(n, std::move(merges));
}

DistanceMatrix cophenetic(const MergeTree& tree, std::vector<std::string> labels) {
  const std::size_t n = tree.leaves();
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) throw Error("label count does not match tree leaves");
  std::vector<double> condensed(n * (n - 1) / 2, 0.0);
  std::vector<std::vector<std::size_t>> members(tree.node_count());
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  for (std::size_t k = 0; k < tree.merges().size(); ++k) {
    const Merge& m = tree.merges()[k];
    for (std::size_t x : members[m.left]) {
      for (std::size_t y : members[m.right]) {
        condensed[DistanceMatrix::index(n, std::min(x, y), std::max(x, y))] = m.height;
      }
    }
    auto& merged = members[n + k];
    merged = std::move(members[m.left]);
    merged.insert(merged.end(), members[m.right].begin(), members[m.right].end());
    members[m.right].clear();
  }
  return DistanceMatrix(std::move(labels), std::move(condensed));
}

void write_merge_dump(std::ostream& out, const MergeTree& tree) {
  char buf[96];
  for (const Merge& m : tree.merges()) {
    std::snprintf(buf, sizeof buf, "%zu %zu %.17g %zu\n", m.left, m.right, m.height, m.size);
    out << buf;
  }
}

MergeTree read_merge_dump(std::istream& in) {
  std::vector<Merge> merges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Merge m{};
    std::string rest;
    if (!(fields >> m.left >> m.right >> m.height >> m.size) || (fields >> rest)) {
      throw Error("merge dump line " + std::to_string(line_no) + ": expected 'left right height size'");
    }
    merges.push_back(m);
  }
  if (merges.empty()) throw Error("merge dump is empty");
  const std::size_t leaves = merges.size() + 1;
  return MergeTree(leaves, std::move(merges));
}

}  // namespace panelclust
