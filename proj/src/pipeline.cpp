#include "panelclust/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "panelclust/error.hpp"

namespace panelclust {
namespace {

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
}

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + '\n'; }

}  // namespace

void RunConfig::apply_reproduce_paper() {
  metric = Metric::euclidean;
  method = Linkage::average;
  cut_k = 4;
  cut_height.reset();
  score = ScoreMode::period_mean();
  relabel_by_mean = true;
}

void RunConfig::validate() const {
  if (input_path.empty()) throw Error("an input panel is required");
  if (cut_k && cut_height) throw Error("give either a cluster count or a cut height, not both");
  const bool cut = cut_k || cut_height;
  if (!cut && (!assignment_out.empty() || !summary_out.empty() || !summary_text_out.empty())) {
    throw Error("assignment and summary outputs need --cut-k or --cut-height");
  }
  if (!covariate_path.empty() && !cut) throw Error("a covariate needs --cut-k or --cut-height");
  if (threads < 1) throw Error("--threads must be at least 1");
  std::set<std::string> paths{input_path};
  if (!covariate_path.empty()) paths.insert(covariate_path);
  for (const auto* out : {&distances_out, &tree_out, &newick_out, &assignment_out, &summary_out,
                          &summary_text_out, &figure_out}) {
    if (out->empty()) continue;
    if (!paths.insert(*out).second) throw Error("path '" + *out + "' is used twice");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_outputs(const std::vector<std::pair<std::string, std::string>>& outputs) {
  std::vector<std::string> written;
  for (const auto& [path, content] : outputs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (out) out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(path, ignored);
      for (const auto& done : written) std::filesystem::remove(done, ignored);
      throw Error("output: cannot write '" + path + "'");
    }
    written.push_back(path);
  }
}

nlohmann::json summary_document(const PanelSeries& panel, const ClusterAssignment& assignment,
                                ScoreMode score, const CovariateMap* covariate,
                                std::vector<ClusterSummary>* summaries) {
  if (assignment.labels() != panel.entities()) throw Error("assignment does not match the panel entities");
  const auto scores = entity_score(panel, score);
  auto rows = cluster_summary(scores, assignment);
  nlohmann::json doc = summary_to_json(rows, assignment);
  doc["score"] = score.describe();
  if (covariate) {
    doc["covariate"] = {{"clusters", summary_to_json(cluster_summary(*covariate, assignment), assignment)["clusters"]},
                        {"extremal", extremal_to_json(extremal_ratio_report(*covariate, assignment))}};
  }
  if (summaries) *summaries = std::move(rows);
  return doc;
}

std::string summary_text(const PanelSeries& panel, const ClusterAssignment& assignment, ScoreMode score) {
  return summary_table(cluster_summary(entity_score(panel, score), assignment), assignment);
}

PipelineResult compute_pipeline(const RunConfig& config, std::ostream* diagnostics) {
  stage("config", [&] { config.validate(); });

  PanelSeries panel = stage("ingest", [&] {
    std::istringstream in(read_text_file(config.input_path));
    return load_panel(in, config.load, diagnostics);
  });
  std::optional<CovariateMap> covariate;
  if (!config.covariate_path.empty()) {
    covariate = stage("ingest", [&] {
      std::istringstream in(read_text_file(config.covariate_path));
      return load_covariate(in, config.load.delimiter);
    });
  }
  DistanceMatrix distances = stage("distance", [&] { return distance_matrix(panel, config.metric, config.threads); });
  MergeTree tree = stage("linkage", [&] { return agglomerate(distances, config.method); });

  std::optional<ClusterAssignment> assignment;
  if (config.cut_k || config.cut_height) {
    assignment = stage("cut", [&] {
      auto flat = config.cut_k ? cut_by_count(tree, panel.entities(), *config.cut_k)
                               : cut_by_height(tree, panel.entities(), *config.cut_height);
      if (config.relabel_by_mean) flat = relabel_by_score_desc(flat, entity_score(panel, config.score));
      return flat;
    });
  }

  PipelineResult result{std::move(panel), std::move(distances), std::move(tree), std::move(assignment), {}, {}};
  auto& outputs = result.outputs;
  const auto& labels = result.panel.entities();

  if (result.assignment) {
    nlohmann::json doc = stage("stats", [&] {
      return summary_document(result.panel, *result.assignment, config.score,
                              covariate ? &*covariate : nullptr, &result.summaries);
    });
    if (!config.summary_out.empty()) {
      doc["schema_version"] = kSchemaVersion;
      doc["metric"] = to_string(config.metric);
      doc["method"] = to_string(config.method);
      outputs.emplace_back(config.summary_out, dump_json(doc));
    }
    if (!config.summary_text_out.empty()) {
      outputs.emplace_back(config.summary_text_out, summary_table(result.summaries, *result.assignment));
    }
    if (!config.assignment_out.empty()) {
      outputs.emplace_back(config.assignment_out, dump_json(assignment_to_json(*result.assignment)));
    }
  }
  if (!config.distances_out.empty()) {
    std::ostringstream out;
    write_matrix_dump(out, result.distances);
    outputs.emplace_back(config.distances_out, out.str());
  }
  if (!config.tree_out.empty()) {
    std::ostringstream out;
    write_merge_dump(out, result.tree);
    outputs.emplace_back(config.tree_out, out.str());
  }
  if (!config.newick_out.empty()) {
    outputs.emplace_back(config.newick_out, stage("tree", [&] {
                           return to_newick(result.tree, labels, {.quote_labels = config.quote_labels}) + '\n';
                         }));
  }
  if (!config.figure_out.empty()) {
    outputs.emplace_back(config.figure_out, stage("render", [&] {
                           return render_dendrogram(result.tree, labels,
                                                    result.assignment ? &*result.assignment : nullptr,
                                                    config.figure);
                         }));
  }
  return result;
}

int run_pipeline(const RunConfig& config, std::ostream& err) {
  try {
    auto result = compute_pipeline(config, &err);
    write_outputs(result.outputs);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace panelclust
