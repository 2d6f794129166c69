#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "panelclust/ingest.hpp"
#include "panelclust/tree.hpp"

namespace panelclust {

/// One row of a cluster table.
struct ClusterSummary {
  std::size_t cluster;
  std::size_t member_count;
  double mean;
  // Sample standard deviation (n-1 denominator) over sqrt(member_count).
  double standard_error;
  double minimum;
  double maximum;
  // maximum / minimum; NaN unless every value is strictly positive.
  double extremal_ratio;
  // Single-member cluster: standard error is reported as 0.
  bool degenerate;
};

/// `scores[i]` belongs to entity i of the assignment.
std::vector<ClusterSummary> cluster_summary(std::span<const double> scores,
                                            const ClusterAssignment& assignment);

/// Looks every assigned entity up by label; all missing labels are listed in
/// the error.
std::vector<ClusterSummary> cluster_summary(const CovariateMap& values,
                                            const ClusterAssignment& assignment);

struct ExtremalRatio {
  std::size_t cluster;
  std::string min_entity;
  std::string max_entity;
  double minimum;
  double maximum;
  double ratio;
};

/// Lowest and highest covariate value per cluster. Requires strictly
/// positive values. Ties go to the lower entity index.
std::vector<ExtremalRatio> extremal_ratio_report(const CovariateMap& values,
                                                 const ClusterAssignment& assignment);

/// How a whole series collapses to one score per entity.
struct ScoreMode {
  std::optional<int> year;  // empty: mean over the whole period

  static ScoreMode period_mean() { return {}; }
  static ScoreMode single_year(int y) { return {y}; }
  std::string describe() const;
};

std::vector<double> entity_score(const PanelSeries& panel, ScoreMode mode);

nlohmann::json summary_to_json(const std::vector<ClusterSummary>& summaries,
                               const ClusterAssignment& assignment);
nlohmann::json extremal_to_json(const std::vector<ExtremalRatio>& report);

/// Plain-text table: one block per cluster headed `Cluster #c -- average m ± se`,
/// members alphabetized and aligned in columns.
std::string summary_table(const std::vector<ClusterSummary>& summaries,
                          const ClusterAssignment& assignment, std::size_t columns = 5);

}  // namespace panelclust
