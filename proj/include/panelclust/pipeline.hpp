#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "panelclust/distance.hpp"
#include "panelclust/ingest.hpp"
#include "panelclust/linkage.hpp"
#include "panelclust/render.hpp"
#include "panelclust/stats.hpp"
#include "panelclust/tree.hpp"

namespace panelclust {

inline constexpr int kSchemaVersion = 1;

/// Everything the `cluster` command needs. Empty output paths are skipped.
struct RunConfig {
  std::string input_path;
  PanelLoadOptions load;

  Metric metric = Metric::euclidean;
  Linkage method = Linkage::average;
  std::optional<std::size_t> cut_k;
  std::optional<double> cut_height;
  ScoreMode score = ScoreMode::period_mean();
  std::string covariate_path;
  // Number clusters by descending mean score instead of lowest member.
  bool relabel_by_mean = false;
  unsigned threads = 1;

  std::string distances_out;
  std::string tree_out;
  std::string newick_out;
  std::string assignment_out;
  std::string summary_out;
  std::string summary_text_out;
  std::string figure_out;
  LayoutSpec figure;
  bool quote_labels = true;

  /// Euclidean distance, average linkage, four clusters, period-mean scores,
  /// clusters numbered by descending mean.
  void apply_reproduce_paper();

  /// Throws when both cut forms are set, a cut-dependent output is requested
  /// without a cut, or two paths coincide.
  void validate() const;
};

/// Intermediate results plus the rendered text of every requested output.
struct PipelineResult {
  PanelSeries panel;
  DistanceMatrix distances;
  MergeTree tree;
  std::optional<ClusterAssignment> assignment;
  std::vector<ClusterSummary> summaries;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, content
};

/// Runs every stage in memory. Errors are rethrown as Error with the failing
/// stage name as prefix (`ingest: ...`). Nothing touches the filesystem
/// except reading the inputs.
PipelineResult compute_pipeline(const RunConfig& config, std::ostream* diagnostics = nullptr);

/// compute_pipeline followed by write_outputs. Returns the process exit code
/// and reports failures on `err`.
int run_pipeline(const RunConfig& config, std::ostream& err);

/// Writes all files or none: on the first failure the files already written
/// are removed and Error is thrown.
void write_outputs(const std::vector<std::pair<std::string, std::string>>& outputs);

std::string read_text_file(const std::string& path);

/// Summary JSON shared by `cluster` and `stats`: scores per cluster and, with
/// a covariate, covariate summaries plus the extremal ratio report.
nlohmann::json summary_document(const PanelSeries& panel, const ClusterAssignment& assignment,
                                ScoreMode score, const CovariateMap* covariate,
                                std::vector<ClusterSummary>* summaries = nullptr);

/// Table text for the same data.
std::string summary_text(const PanelSeries& panel, const ClusterAssignment& assignment, ScoreMode score);

}  // namespace panelclust
