#include <numeric>

#include "doctest.h"
#include "panelclust/error.hpp"
#include "panelclust/stats.hpp"
#include "support.hpp"

using namespace panelclust;

namespace {

ClusterAssignment single_cluster(std::size_t n) {
  return ClusterAssignment(support::names(n), std::vector<std::size_t>(n, 0));
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("mean and standard error with the n-1 convention") {
  std::vector<double> xs{2, 4, 9};
  auto s = cluster_summary(xs, single_cluster(3)).at(0);
  CHECK(s.member_count == 3);
  CHECK(s.mean == 5.0);
  // sqrt(13)/sqrt(3), frozen from an independent evaluation.
  CHECK(std::abs(s.standard_error - 2.0816659994661326) < 1e-9);
  CHECK(s.minimum == 2.0);
  CHECK(s.maximum == 9.0);
  CHECK(s.extremal_ratio == 4.5);
  CHECK_FALSE(s.degenerate);
}

TEST_CASE("constant and singleton clusters") {
  std::vector<double> xs{0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  auto s = cluster_summary(xs, single_cluster(7)).at(0);
  CHECK(s.mean == 0.1);
  CHECK(s.standard_error == 0.0);
  CHECK(s.extremal_ratio == 1.0);

  std::vector<double> one{42.0, 1.0};
  auto pair = cluster_summary(one, ClusterAssignment({"a", "b"}, {0, 1}));
  CHECK(pair[0].degenerate);
  CHECK(pair[0].standard_error == 0.0);
  CHECK(pair[0].mean == 42.0);
  CHECK(pair[0].extremal_ratio == 1.0);
}

TEST_CASE("non-positive values leave the ratio undefined") {
  std::vector<double> xs{0.0, 10.0};
  CHECK(std::isnan(cluster_summary(xs, single_cluster(2))[0].extremal_ratio));
}

TEST_CASE("covariate lookup") {
  ClusterAssignment a({"Malawi", "Russia", "Chile"}, {0, 0, 1});
  CovariateMap gdp{{"Malawi", 287}, {"Russia", 14090}, {"Chile", 15000}};
  auto rows = cluster_summary(gdp, a);
  CHECK(rows[0].mean == (287.0 + 14090.0) / 2);
  CHECK(rows[1].member_count == 1);

  CovariateMap partial{{"Russia", 14090}};
  CHECK_THROWS_WITH_AS(cluster_summary(partial, a), doctest::Contains("Malawi, Chile"), Error);
  CHECK_THROWS_AS(cluster_summary(std::vector<double>{1.0}, a), Error);
}

TEST_CASE("extremal ratio report") {
  SUBCASE("endpoints quoted for the most corrupt cluster") {
    ClusterAssignment a({"Malawi", "Brazil", "Russia"}, {0, 0, 0});
    CovariateMap gdp{{"Malawi", 287}, {"Russia", 14090}, {"Brazil", 11320}};
    auto r = extremal_ratio_report(gdp, a).at(0);
    CHECK(r.min_entity == "Malawi");
    CHECK(r.max_entity == "Russia");
    CHECK(r.ratio == 49.09407665505226);
    CHECK(r.ratio != doctest::Approx(53.0).epsilon(0.01));
  }
  SUBCASE("singleton") {
    ClusterAssignment a({"x", "y"}, {0, 1});
    CovariateMap v{{"x", 3}, {"y", 4}};
    auto r = extremal_ratio_report(v, a);
    CHECK(r[0].min_entity == "x");
    CHECK(r[0].max_entity == "x");
    CHECK(r[0].ratio == 1.0);
  }
  SUBCASE("forced arithmetic") {
    ClusterAssignment a({"x", "y", "z"}, {0, 0, 0});
    CovariateMap v{{"x", 10}, {"y", 20}, {"z", 80}};
    CHECK(extremal_ratio_report(v, a)[0].ratio == 8.0);
  }
  SUBCASE("ties go to the lower entity index") {
    ClusterAssignment a({"p", "q", "r"}, {0, 0, 0});
    CovariateMap v{{"p", 5}, {"q", 5}, {"r", 5}};
    auto r = extremal_ratio_report(v, a)[0];
    CHECK(r.min_entity == "p");
    CHECK(r.max_entity == "p");
  }
  SUBCASE("non-positive values are rejected") {
    ClusterAssignment a({"x", "y"}, {0, 0});
    CHECK_THROWS_WITH_AS(extremal_ratio_report(CovariateMap{{"x", 0}, {"y", 4}}, a), doctest::Contains("'x'"), Error);
    CHECK_THROWS_AS(extremal_ratio_report(CovariateMap{{"x", -1}, {"y", 4}}, a), Error);
  }
}

TEST_CASE("entity scores") {
  PanelSeries p({"a", "b"}, {1996, 1997, 1998}, {10, 20, 30, 0.1, 0.1, 0.1});
  auto mean = entity_score(p, ScoreMode::period_mean());
  CHECK(mean[0] == 20.0);
  CHECK(mean[1] == 0.1);
  CHECK(entity_score(p, ScoreMode::single_year(1996)) == std::vector<double>{10.0, 0.1});
  CHECK(entity_score(p, ScoreMode::single_year(1998)) == std::vector<double>{30.0, 0.1});
  for (int y : p.years()) CHECK(entity_score(p, ScoreMode::single_year(y))[1] == mean[1]);
  CHECK_THROWS_WITH_AS(entity_score(p, ScoreMode::single_year(2020)), doctest::Contains("2020"), Error);
  CHECK(ScoreMode::period_mean().describe() == "period_mean");
  CHECK(ScoreMode::single_year(2012).describe() == "year:2012");
}

TEST_CASE("property: weighted cluster means recompose the global mean") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + trial;
    std::vector<double> xs(n);
    for (double& x : xs) x = value(rng);
    std::vector<std::size_t> groups(n);
    std::uniform_int_distribution<std::size_t> pick(0, 4);
    for (auto& g : groups) g = pick(rng);
    auto a = ClusterAssignment::canonical(support::names(n), groups);
    double weighted = 0.0;
    for (const auto& s : cluster_summary(xs, a)) weighted += s.mean * static_cast<double>(s.member_count);
    const double global = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    CHECK(std::abs(weighted / static_cast<double>(n) - global) <= 1e-12 * std::max(1.0, global));
  }
}

TEST_CASE("property: relabeling permutes summaries without changing them") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::vector<double> xs(30);
  for (double& x : xs) x = value(rng);
  std::vector<std::size_t> groups(30);
  for (std::size_t i = 0; i < 30; ++i) groups[i] = i % 4;
  auto a = ClusterAssignment::canonical(support::names(30), groups);
  auto b = relabel_by_score_desc(a, xs);
  auto sa = cluster_summary(xs, a), sb = cluster_summary(xs, b);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto& x = sa[a.cluster_of(i)];
    const auto& y = sb[b.cluster_of(i)];
    CHECK(x.mean == y.mean);
    CHECK(x.standard_error == y.standard_error);
    CHECK(x.member_count == y.member_count);
  }
  for (std::size_t c = 1; c < sb.size(); ++c) CHECK(sb[c - 1].mean >= sb[c].mean);
}

TEST_CASE("property: duplicating a cluster m-fold rescales the standard error") {
  // With the n-1 convention: SE_m / SE_1 = sqrt((n-1)/(m*n-1)), tending to 1/sqrt(m).
  const std::vector<double> base{3.0, 7.0, 8.0, 14.0};
  const double se1 = cluster_summary(base, single_cluster(4))[0].standard_error;
  for (std::size_t m : {2, 3, 5, 10}) {
    std::vector<double> dup;
    for (std::size_t r = 0; r < m; ++r) dup.insert(dup.end(), base.begin(), base.end());
    const double sem = cluster_summary(dup, single_cluster(dup.size()))[0].standard_error;
    const double n = static_cast<double>(base.size()), mm = static_cast<double>(m);
    CHECK(sem / se1 == doctest::Approx(std::sqrt((n - 1) / (mm * n - 1))).epsilon(1e-12));
  }
}

TEST_CASE("summary table and JSON") {
  ClusterAssignment a({"Zimbabwe", "Austria", "Chile", "Denmark"}, {1, 0, 0, 0});
  std::vector<double> scores{20, 80, 70, 90};
  auto rows = cluster_summary(scores, a);
  auto text = summary_table(rows, a, 2);
  CHECK(text.find("Cluster #1 -- average 80.00 ± 5.77 (n=3)\n") == 0);
  CHECK(text.find("Austria  Chile\nDenmark\n") != std::string::npos);
  CHECK(text.find("Cluster #2 -- average 20.00 ± 0.00 (n=1)") != std::string::npos);

  auto doc = summary_to_json(rows, a);
  CHECK(doc["k"] == 2);
  CHECK(doc["clusters"][0]["members"] == nlohmann::json({"Austria", "Chile", "Denmark"}));
  CHECK(doc["clusters"][1]["degenerate"] == true);

  std::vector<double> with_zero{20, 0, 70, 90};
  CHECK(summary_to_json(cluster_summary(with_zero, a), a)["clusters"][0]["extremal_ratio"].is_null());
}

TEST_SUITE_END();
