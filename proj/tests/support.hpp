#pragma once

// Random instance generators shared by the property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "panelclust/distance.hpp"
#include "panelclust/ingest.hpp"
#include "panelclust/linkage.hpp"

namespace support {

inline std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("e" + std::to_string(i));
  return out;
}

inline panelclust::PanelSeries random_panel(std::mt19937_64& rng, std::size_t n, std::size_t t,
                                            double lo = 0.0, double hi = 100.0) {
  std::uniform_real_distribution<double> value(lo, hi);
  std::vector<int> years;
  for (std::size_t y = 0; y < t; ++y) years.push_back(1996 + static_cast<int>(y));
  std::vector<double> values(n * t);
  for (double& v : values) v = value(rng);
  return panelclust::PanelSeries(names(n), std::move(years), std::move(values));
}

// Arbitrary dissimilarities (not necessarily metric), tie-free with probability 1.
inline panelclust::DistanceMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> value(0.01, 10.0);
  std::vector<double> condensed(n * (n - 1) / 2);
  for (double& d : condensed) d = value(rng);
  return panelclust::DistanceMatrix(names(n), std::move(condensed));
}

inline panelclust::MergeTree random_tree(std::mt19937_64& rng, std::size_t n,
                                         panelclust::Linkage method = panelclust::Linkage::average) {
  return panelclust::agglomerate(random_matrix(rng, n), method);
}

inline constexpr panelclust::Linkage kAllMethods[] = {
    panelclust::Linkage::average, panelclust::Linkage::complete, panelclust::Linkage::single,
    panelclust::Linkage::ward, panelclust::Linkage::ward_d1};

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(a));
}

}  // namespace support
