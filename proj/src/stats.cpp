#include "panelclust/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "panelclust/error.hpp"

namespace panelclust {
namespace {

// Sequential sum / count, clamped to the sample range: summing m copies of v
// need not return m*v exactly, and a constant sample must keep mean == v.
double mean_of(std::span<const double> xs, double lo, double hi) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return std::clamp(sum / static_cast<double>(xs.size()), lo, hi);
}

ClusterSummary summarize(std::size_t cluster, std::span<const double> xs) {
  ClusterSummary s{};
  s.cluster = cluster;
  s.member_count = xs.size();
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.minimum = *lo;
  s.maximum = *hi;
  s.mean = mean_of(xs, s.minimum, s.maximum);
  s.degenerate = xs.size() == 1;
  if (!s.degenerate) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    s.standard_error = sd / std::sqrt(static_cast<double>(xs.size()));
  }
  s.extremal_ratio = s.minimum > 0.0 ? s.maximum / s.minimum : std::numeric_limits<double>::quiet_NaN();
  return s;
}

std::vector<double> lookup(const CovariateMap& values, const ClusterAssignment& assignment) {
  std::vector<double> out;
  std::string missing;
  for (const auto& label : assignment.labels()) {
    auto it = values.find(label);
    if (it == values.end()) {
      missing += (missing.empty() ? "" : ", ") + label;
      out.push_back(0.0);
    } else {
      out.push_back(it->second);
    }
  }
  if (!missing.empty()) throw Error("no value for: " + missing);
  return out;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<ClusterSummary> cluster_summary(std::span<const double> scores,
                                            const ClusterAssignment& assignment) {
  if (scores.size() != assignment.size()) {
    throw Error("got " + std::to_string(scores.size()) + " scores for " +
                std::to_string(assignment.size()) + " entities");
  }
  std::vector<ClusterSummary> out;
  for (std::size_t c = 0; c < assignment.k(); ++c) {
    std::vector<double> xs;
    for (std::size_t i : assignment.members(c)) xs.push_back(scores[i]);
    out.push_back(summarize(c, xs));
  }
  return out;
}

std::vector<ClusterSummary> cluster_summary(const CovariateMap& values,
                                            const ClusterAssignment& assignment) {
  return cluster_summary(lookup(values, assignment), assignment);
}

std::vector<ExtremalRatio> extremal_ratio_report(const CovariateMap& values,
                                                 const ClusterAssignment& assignment) {
  const auto xs = lookup(values, assignment);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) {
      throw Error("extremal ratio needs positive values; '" + assignment.labels()[i] + "' has " +
                  fixed2(xs[i]));
    }
  }
  std::vector<ExtremalRatio> out;
  for (std::size_t c = 0; c < assignment.k(); ++c) {
    auto members = assignment.members(c);
    std::size_t lo = members.front(), hi = members.front();
    for (std::size_t i : members) {
      if (xs[i] < xs[lo]) lo = i;
      if (xs[i] > xs[hi]) hi = i;
    }
    out.push_back({c, assignment.labels()[lo], assignment.labels()[hi], xs[lo], xs[hi], xs[hi] / xs[lo]});
  }
  return out;
}

std::string ScoreMode::describe() const {
  return year ? "year:" + std::to_string(*year) : "period_mean";
}

std::vector<double> entity_score(const PanelSeries& panel, ScoreMode mode) {
  std::vector<double> out;
  out.reserve(panel.size());
  if (mode.year) {
    auto it = std::find(panel.years().begin(), panel.years().end(), *mode.year);
    if (it == panel.years().end()) throw Error("year " + std::to_string(*mode.year) + " not in panel");
    const auto t = static_cast<std::size_t>(it - panel.years().begin());
    for (std::size_t i = 0; i < panel.size(); ++i) out.push_back(panel.at(i, t));
    return out;
  }
  for (std::size_t i = 0; i < panel.size(); ++i) {
    auto row = panel.row(i);
    auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    out.push_back(mean_of(row, *lo, *hi));
  }
  return out;
}

nlohmann::json summary_to_json(const std::vector<ClusterSummary>& summaries,
                               const ClusterAssignment& assignment) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& s : summaries) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t i : assignment.members(s.cluster)) members.push_back(assignment.labels()[i]);
    clusters.push_back({{"id", s.cluster},
                        {"member_count", s.member_count},
                        {"mean", s.mean},
                        {"standard_error", s.standard_error},
                        {"min", s.minimum},
                        {"max", s.maximum},
                        {"extremal_ratio", number_or_null(s.extremal_ratio)},
                        {"degenerate", s.degenerate},
                        {"members", std::move(members)}});
  }
  return {{"k", assignment.k()}, {"clusters", std::move(clusters)}};
}

nlohmann::json extremal_to_json(const std::vector<ExtremalRatio>& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report) {
    rows.push_back({{"id", r.cluster},
                    {"min_entity", r.min_entity},
                    {"max_entity", r.max_entity},
                    {"min", r.minimum},
                    {"max", r.maximum},
                    {"ratio", r.ratio}});
  }
  return rows;
}

std::string summary_table(const std::vector<ClusterSummary>& summaries,
                          const ClusterAssignment& assignment, std::size_t columns) {
  columns = std::max<std::size_t>(columns, 1);
  std::string out;
  for (const auto& s : summaries) {
    std::vector<std::string> names;
    for (std::size_t i : assignment.members(s.cluster)) names.push_back(assignment.labels()[i]);
    std::sort(names.begin(), names.end());
    std::size_t width = 0;
    for (const auto& name : names) width = std::max(width, name.size());

    std::string header = "Cluster #" + std::to_string(s.cluster + 1) + " -- average " + fixed2(s.mean) +
                         " ± " + fixed2(s.standard_error) + " (n=" + std::to_string(s.member_count) + ")";
    // "±" occupies two bytes but one column.
    out += header + '\n' + std::string(header.size() - 1, '-') + '\n';
    for (std::size_t i = 0; i < names.size(); ++i) {
      const bool last_in_row = (i + 1) % columns == 0 || i + 1 == names.size();
      out += names[i];
      out += last_in_row ? std::string("\n") : std::string(width - names[i].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace panelclust
