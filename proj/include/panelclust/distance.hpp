#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "panelclust/ingest.hpp"

namespace panelclust {

enum class Metric { euclidean, manhattan, chebyshev };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

/// Dissimilarity between two equal-length series. Sums run in ascending
/// index order with plain double accumulation, so results are reproducible
/// bit for bit.
double pairwise_distance(std::span<const double> x, std::span<const double> y,
                         Metric metric = Metric::euclidean);

/// Symmetric zero-diagonal matrix kept as its strict upper triangle in
/// row-major order: (0,1), (0,2), ..., (0,n-1), (1,2), ...
class DistanceMatrix {
 public:
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> condensed);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const double> condensed() const { return condensed_; }

  /// Position of (i, j), i < j, in the condensed vector.
  static std::size_t index(std::size_t n, std::size_t i, std::size_t j) {
    return n * i - i * (i + 1) / 2 + (j - i - 1);
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return condensed_[index(size(), i, j)];
  }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> condensed_;
};

/// All pairwise distances between panel rows. Pairs are spread over
/// `threads` workers; the result is identical for any thread count.
DistanceMatrix distance_matrix(const PanelSeries& panel, Metric metric = Metric::euclidean,
                               unsigned threads = 1);

/// Text dump: first line `n`, then `i j d` per pair with 17 significant digits.
void write_matrix_dump(std::ostream& out, const DistanceMatrix& matrix);

/// Inverse of write_matrix_dump. Without labels the entities are named by index.
DistanceMatrix read_matrix_dump(std::istream& in, std::vector<std::string> labels = {});

}  // namespace panelclust
