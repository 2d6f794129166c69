#include "panelclust/distance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <thread>

#include "panelclust/error.hpp"

namespace panelclust {

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "manhattan") return Metric::manhattan;
  if (name == "chebyshev") return Metric::chebyshev;
  throw Error("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    case Metric::chebyshev: return "chebyshev";
  }
  return "?";
}

double pairwise_distance(std::span<const double> x, std::span<const double> y, Metric metric) {
  if (x.size() != y.size()) {
    throw Error("series length mismatch: " + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()));
  }
  if (x.empty()) throw Error("series must not be empty");
  double acc = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (!std::isfinite(x[t]) || !std::isfinite(y[t])) throw Error("non-finite series value");
    const double diff = x[t] - y[t];
    switch (metric) {
      case Metric::euclidean: acc += diff * diff; break;
      case Metric::manhattan: acc += std::abs(diff); break;
      case Metric::chebyshev: acc = std::max(acc, std::abs(diff)); break;
    }
  }
  return metric == Metric::euclidean ? std::sqrt(acc) : acc;
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> condensed)
    : labels_(std::move(labels)), condensed_(std::move(condensed)) {
  const std::size_t n = labels_.size();
  if (n < 1) throw Error("distance matrix needs at least one entity");
  if (condensed_.size() != n * (n - 1) / 2) {
    throw Error("condensed matrix of " + std::to_string(condensed_.size()) +
                " entries does not fit n=" + std::to_string(n));
  }
  for (double d : condensed_) {
    if (!std::isfinite(d) || d < 0.0) throw Error("distances must be finite and non-negative");
  }
}

namespace {

// PanelSeries values are finite and rows share one length, so no checks here.
template <Metric M>
void fill_rows(const PanelSeries& panel, double* condensed, std::size_t first, std::size_t stride) {
  const std::size_t n = panel.size(), t = panel.length();
  const double* values = panel.values().data();
  for (std::size_t i = first; i < n; i += stride) {
    const double* x = values + i * t;
    double* out = condensed + DistanceMatrix::index(n, i, i + 1);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* y = values + j * t;
      double acc = 0.0;
      for (std::size_t k = 0; k < t; ++k) {
        const double diff = x[k] - y[k];
        if constexpr (M == Metric::euclidean) acc += diff * diff;
        if constexpr (M == Metric::manhattan) acc += std::abs(diff);
        if constexpr (M == Metric::chebyshev) acc = std::max(acc, std::abs(diff));
      }
      *out++ = M == Metric::euclidean ? std::sqrt(acc) : acc;
    }
  }
}

}  // namespace

DistanceMatrix distance_matrix(const PanelSeries& panel, Metric metric, unsigned threads) {
  const std::size_t n = panel.size();
  std::vector<double> condensed(n * (n - 1) / 2);

  // Rows are dealt round-robin so long and short rows mix across workers.
  auto work = [&](std::size_t first, std::size_t stride) {
    switch (metric) {
      case Metric::euclidean: fill_rows<Metric::euclidean>(panel, condensed.data(), first, stride); break;
      case Metric::manhattan: fill_rows<Metric::manhattan>(panel, condensed.data(), first, stride); break;
      case Metric::chebyshev: fill_rows<Metric::chebyshev>(panel, condensed.data(), first, stride); break;
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n / 2, 1));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
  }
  return DistanceMatrix(panel.entities(), std::move(condensed));
}

void write_matrix_dump(std::ostream& out, const DistanceMatrix& matrix) {
  const std::size_t n = matrix.size();
  out << n << '\n';
  char buf[64];
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i, j, matrix.condensed()[pos++]);
      out << buf;
    }
  }
}

DistanceMatrix read_matrix_dump(std::istream& in, std::vector<std::string> labels) {
  std::size_t n = 0;
  if (!(in >> n) || n < 1) throw Error("matrix dump: missing entity count");
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) {
    throw Error("matrix dump has " + std::to_string(n) + " entities but " +
                std::to_string(labels.size()) + " labels were given");
  }
  std::vector<double> condensed(n * (n - 1) / 2);
  std::vector<bool> filled(condensed.size(), false);
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (in >> i >> j >> d) {
    if (i >= j || j >= n) throw Error("matrix dump: bad pair " + std::to_string(i) + " " + std::to_string(j));
    auto pos = DistanceMatrix::index(n, i, j);
    if (filled[pos]) throw Error("matrix dump: repeated pair " + std::to_string(i) + " " + std::to_string(j));
    condensed[pos] = d;
    filled[pos] = true;
  }
  if (!in.eof()) throw Error("matrix dump: malformed line");
  if (std::find(filled.begin(), filled.end(), false) != filled.end()) throw Error("matrix dump: missing pairs");
  return DistanceMatrix(std::move(labels), std::move(condensed));
}

}  // namespace panelclust
