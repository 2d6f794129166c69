// panelclust: hierarchical clustering of panel time series.
//
//   panelclust cluster  --input panel.csv --cut-k 4 --summary out.json ...
//   panelclust distances|tree|cut|stats|render   (single stages)

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "panelclust/error.hpp"
#include "panelclust/pipeline.hpp"

using namespace panelclust;

namespace {

struct InputFlags {
  std::string path;
  std::string format = "wide";
  bool tab = false;
  bool filter_incomplete = false;
  std::string expect_range;

  PanelLoadOptions options() const {
    PanelLoadOptions o;
    o.format = format == "long" ? PanelFormat::longform : PanelFormat::wide;
    o.delimiter = tab ? '\t' : ',';
    o.filter_incomplete = filter_incomplete;
    if (!expect_range.empty()) o.expect_range = parse_value_range(expect_range);
    return o;
  }

  PanelSeries load() const {
    std::istringstream in(read_text_file(path));
    return load_panel(in, options(), &std::cerr);
  }
};

CLI::Option* add_input(CLI::App* app, InputFlags& flags, bool required) {
  auto* opt = app->add_option("-i,--input", flags.path, "Panel file");
  if (required) opt->required();
  app->add_option("--format", flags.format, "Panel layout")->check(CLI::IsMember({"wide", "long"}));
  app->add_flag("--tab", flags.tab, "Tab-separated instead of comma-separated");
  app->add_flag("--filter-incomplete", flags.filter_incomplete, "Drop entities with missing years");
  app->add_option("--expect-range", flags.expect_range, "Reject values outside lo:hi");
  return opt;
}

struct FigureFlags {
  std::string layout = "radial";
  double width = 800.0;
  double height = 800.0;
  double font_size = 10.0;
  double label_margin = 120.0;
  bool no_separators = false;

  LayoutSpec spec() const {
    return {parse_layout(layout), width, height, font_size, label_margin, !no_separators};
  }
};

void add_figure(CLI::App* app, FigureFlags& flags) {
  app->add_option("--layout", flags.layout, "Dendrogram layout")->check(CLI::IsMember({"radial", "rectangular"}));
  app->add_option("--width", flags.width, "Canvas width");
  app->add_option("--height", flags.height, "Canvas height");
  app->add_option("--font-size", flags.font_size, "Leaf label font size");
  app->add_option("--label-margin", flags.label_margin, "Space reserved for leaf labels");
  app->add_flag("--no-separators", flags.no_separators, "Omit dashed cluster boundaries");
}

std::string render_dump(const DistanceMatrix& d) {
  std::ostringstream out;
  write_matrix_dump(out, d);
  return out.str();
}

std::string render_dump(const MergeTree& t) {
  std::ostringstream out;
  write_merge_dump(out, t);
  return out.str();
}

MergeTree load_tree(const std::string& path) {
  std::istringstream in(read_text_file(path));
  return read_merge_dump(in);
}

ClusterAssignment load_assignment(const std::string& path, const std::vector<std::string>& labels) {
  return assignment_from_json(nlohmann::json::parse(read_text_file(path)), labels);
}

// Runs one stage; failures are reported with the stage name and exit code 1.
template <typename F>
int run_stage(const char* name, F&& body) {
  try {
    write_outputs(body());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << name << ": " << e.what() << '\n';
    return 1;
  }
}

using Outputs = std::vector<std::pair<std::string, std::string>>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical clustering of panel time series"};
  app.require_subcommand(1);

  // cluster
  RunConfig config;
  InputFlags cluster_in;
  FigureFlags cluster_fig;
  std::string metric = "euclidean", method = "average";
  std::size_t cut_k = 0;
  double cut_height = 0.0;
  int score_year = 0;
  bool reproduce = false, no_quote = false;
  auto* cluster = app.add_subcommand("cluster", "Full pipeline: ingest, distances, linkage, cut, stats, render");
  add_input(cluster, cluster_in, true);
  auto* metric_opt = cluster->add_option("--metric", metric, "euclidean|manhattan|chebyshev");
  auto* method_opt = cluster->add_option("--method", method, "average|complete|single|ward|ward-d1");
  auto* k_opt = cluster->add_option("--cut-k", cut_k, "Cut into this many clusters");
  auto* h_opt = cluster->add_option("--cut-height", cut_height, "Cut at this merge height");
  k_opt->excludes(h_opt);
  auto* year_opt = cluster->add_option("--score-year", score_year, "Score entities by one year instead of the period mean");
  cluster->add_option("--covariate", config.covariate_path, "Covariate file (entity,value)");
  cluster->add_flag("--relabel-by-mean", config.relabel_by_mean, "Number clusters by descending mean score");
  cluster->add_option("--threads", config.threads, "Worker threads for the distance stage");
  cluster->add_option("--distances-out", config.distances_out, "Distance matrix dump");
  cluster->add_option("--tree-out", config.tree_out, "Merge tree dump");
  cluster->add_option("--newick", config.newick_out, "Newick tree");
  cluster->add_option("--assignment", config.assignment_out, "Cluster assignment JSON");
  cluster->add_option("--summary", config.summary_out, "Cluster summary JSON");
  cluster->add_option("--summary-text", config.summary_text_out, "Cluster summary table");
  cluster->add_option("--figure", config.figure_out, "Dendrogram SVG");
  cluster->add_flag("--no-quote", no_quote, "Reject Newick-reserved characters instead of quoting");
  add_figure(cluster, cluster_fig);
  auto* reproduce_opt = cluster->add_flag("--reproduce-paper", reproduce,
                                          "Euclidean, average linkage, 4 clusters, period-mean scores");
  for (auto* opt : {metric_opt, method_opt, k_opt, h_opt, year_opt}) reproduce_opt->excludes(opt);

  // distances
  InputFlags dist_in;
  std::string dist_metric = "euclidean", dist_out;
  unsigned dist_threads = 1;
  auto* distances = app.add_subcommand("distances", "Write the pairwise distance matrix");
  add_input(distances, dist_in, true);
  distances->add_option("--metric", dist_metric, "euclidean|manhattan|chebyshev");
  distances->add_option("--threads", dist_threads, "Worker threads");
  distances->add_option("-o,--out", dist_out, "Matrix dump")->required();

  // tree
  InputFlags tree_in;
  std::string tree_metric = "euclidean", tree_method = "average", tree_dist, tree_out, tree_newick;
  auto* tree = app.add_subcommand("tree", "Agglomerate a panel or a distance dump into a merge tree");
  add_input(tree, tree_in, false);
  tree->add_option("--distances", tree_dist, "Distance matrix dump (labels from --input when given)");
  tree->add_option("--metric", tree_metric, "euclidean|manhattan|chebyshev");
  tree->add_option("--method", tree_method, "average|complete|single|ward|ward-d1");
  tree->add_option("-o,--out", tree_out, "Merge tree dump");
  tree->add_option("--newick", tree_newick, "Newick tree");

  // cut
  InputFlags cut_in;
  std::string cut_tree, cut_out;
  std::size_t cut_count = 0;
  double cut_at = 0.0;
  int cut_year = 0;
  bool cut_relabel = false;
  auto* cut = app.add_subcommand("cut", "Cut a merge tree into flat clusters");
  add_input(cut, cut_in, true)->description("Panel providing entity labels");
  cut->add_option("--tree", cut_tree, "Merge tree dump")->required();
  auto* cut_k_opt = cut->add_option("--cut-k", cut_count, "Number of clusters");
  auto* cut_h_opt = cut->add_option("--cut-height", cut_at, "Cut height");
  cut_k_opt->excludes(cut_h_opt);
  cut->add_flag("--relabel-by-mean", cut_relabel, "Number clusters by descending mean score");
  auto* cut_year_opt = cut->add_option("--score-year", cut_year, "Score year for --relabel-by-mean");
  cut->add_option("-o,--out", cut_out, "Assignment JSON")->required();

  // stats
  InputFlags stats_in;
  std::string stats_assignment, stats_covariate, stats_out, stats_text;
  int stats_year = 0;
  auto* stats = app.add_subcommand("stats", "Per-cluster means, standard errors and ratios");
  add_input(stats, stats_in, true);
  stats->add_option("--assignment", stats_assignment, "Assignment JSON")->required();
  auto* stats_year_opt = stats->add_option("--score-year", stats_year, "Score by one year");
  stats->add_option("--covariate", stats_covariate, "Covariate file (entity,value)");
  stats->add_option("-o,--out", stats_out, "Summary JSON");
  stats->add_option("--text", stats_text, "Summary table");

  // render
  InputFlags render_in;
  FigureFlags render_fig;
  std::string render_tree, render_assignment, render_out;
  auto* render = app.add_subcommand("render", "Draw a merge tree as SVG");
  add_input(render, render_in, true)->description("Panel providing entity labels");
  render->add_option("--tree", render_tree, "Merge tree dump")->required();
  render->add_option("--assignment", render_assignment, "Assignment JSON for separators");
  render->add_option("-o,--out", render_out, "SVG file")->required();
  add_figure(render, render_fig);

  CLI11_PARSE(app, argc, argv);

  if (*cluster) {
    try {
      config.input_path = cluster_in.path;
      config.load = cluster_in.options();
      config.metric = parse_metric(metric);
      config.method = parse_linkage(method);
      if (*k_opt) config.cut_k = cut_k;
      if (*h_opt) config.cut_height = cut_height;
      if (*year_opt) config.score = ScoreMode::single_year(score_year);
      config.figure = cluster_fig.spec();
      config.quote_labels = !no_quote;
      if (reproduce) config.apply_reproduce_paper();
    } catch (const std::exception& e) {
      std::cerr << "error: config: " << e.what() << '\n';
      return 1;
    }
    return run_pipeline(config, std::cerr);
  }

  if (*distances) {
    return run_stage("distances", [&] {
      auto panel = dist_in.load();
      return Outputs{{dist_out, render_dump(distance_matrix(panel, parse_metric(dist_metric), dist_threads))}};
    });
  }

  if (*tree) {
    return run_stage("tree", [&] {
      if (tree_in.path.empty() && tree_dist.empty()) throw Error("need --input or --distances");
      if (tree_out.empty() && tree_newick.empty()) throw Error("need --out or --newick");
      std::vector<std::string> labels;
      if (!tree_in.path.empty()) labels = tree_in.load().entities();
      DistanceMatrix d = [&] {
        if (!tree_dist.empty()) {
          std::istringstream in(read_text_file(tree_dist));
          return read_matrix_dump(in, labels);
        }
        return distance_matrix(tree_in.load(), parse_metric(tree_metric));
      }();
      auto merges = agglomerate(d, parse_linkage(tree_method));
      Outputs out;
      if (!tree_out.empty()) out.emplace_back(tree_out, render_dump(merges));
      if (!tree_newick.empty()) {
        out.emplace_back(tree_newick, to_newick(merges, d.labels(), {.quote_labels = true}) + '\n');
      }
      return out;
    });
  }

  if (*cut) {
    return run_stage("cut", [&] {
      auto panel = cut_in.load();
      auto merges = load_tree(cut_tree);
      if (!*cut_k_opt && !*cut_h_opt) throw Error("need --cut-k or --cut-height");
      auto flat = *cut_k_opt ? cut_by_count(merges, panel.entities(), cut_count)
                             : cut_by_height(merges, panel.entities(), cut_at);
      if (cut_relabel) {
        auto mode = *cut_year_opt ? ScoreMode::single_year(cut_year) : ScoreMode::period_mean();
        flat = relabel_by_score_desc(flat, entity_score(panel, mode));
      }
      return Outputs{{cut_out, assignment_to_json(flat).dump(2) + '\n'}};
    });
  }

  if (*stats) {
    return run_stage("stats", [&] {
      if (stats_out.empty() && stats_text.empty()) throw Error("need --out or --text");
      auto panel = stats_in.load();
      auto flat = load_assignment(stats_assignment, panel.entities());
      auto mode = *stats_year_opt ? ScoreMode::single_year(stats_year) : ScoreMode::period_mean();
      std::optional<CovariateMap> covariate;
      if (!stats_covariate.empty()) {
        std::istringstream in(read_text_file(stats_covariate));
        covariate = load_covariate(in, stats_in.tab ? '\t' : ',');
      }
      Outputs out;
      if (!stats_out.empty()) {
        auto doc = summary_document(panel, flat, mode, covariate ? &*covariate : nullptr);
        doc["schema_version"] = kSchemaVersion;
        out.emplace_back(stats_out, doc.dump(2) + '\n');
      }
      if (!stats_text.empty()) out.emplace_back(stats_text, summary_text(panel, flat, mode));
      return out;
    });
  }

  if (*render) {
    return run_stage("render", [&] {
      auto panel = render_in.load();
      auto merges = load_tree(render_tree);
      std::optional<ClusterAssignment> flat;
      if (!render_assignment.empty()) flat = load_assignment(render_assignment, panel.entities());
      return Outputs{{render_out, render_dendrogram(merges, panel.entities(), flat ? &*flat : nullptr,
                                                    render_fig.spec())}};
    });
  }
  return 0;
}
