#include <sstream>

#include "doctest.h"
#include "panelclust/error.hpp"
#include "panelclust/ingest.hpp"
#include "support.hpp"

using namespace panelclust;

namespace {

PanelSeries load(const std::string& text, PanelLoadOptions options = {}, std::ostream* diag = nullptr) {
  std::istringstream in(text);
  return load_panel(in, options, diag);
}

PanelLoadOptions long_format(bool filter = false) {
  PanelLoadOptions o;
  o.format = PanelFormat::longform;
  o.filter_incomplete = filter;
  return o;
}

}  // namespace

TEST_SUITE_BEGIN("ingest");

TEST_CASE("minimal wide panel") {
  auto p = load("entity,2000,2001\nA,1,2\nB,3,4\nC,5,6\n");
  CHECK(p.size() == 3);
  CHECK(p.length() == 2);
  CHECK(p.entities() == std::vector<std::string>{"A", "B", "C"});
  CHECK(p.years() == std::vector<int>{2000, 2001});
  CHECK(p.at(2, 1) == 6.0);
}

TEST_CASE("134 complete countries over 1996-2014") {
  std::mt19937_64 rng(134);
  auto source = support::random_panel(rng, 134, 19);
  std::ostringstream text;
  write_panel_wide(text, source);
  auto p = load(text.str());
  CHECK(p.size() == 134);
  CHECK(p.length() == 19);
  CHECK(p.years().front() == 1996);
  CHECK(p.years().back() == 2014);
}

TEST_CASE("completeness filter drops entities with gaps and reports them") {
  const std::string text =
      "entity,year,value\n"
      "A,2000,1\nA,2001,2\nA,2002,3\n"
      "B,2000,4\nB,2002,5\n"
      "C,2002,6\nC,2001,7\nC,2000,8\n";
  std::ostringstream diag;
  auto p = load(text, long_format(true), &diag);
  CHECK(p.entities() == std::vector<std::string>{"A", "C"});
  CHECK(p.years() == std::vector<int>{2000, 2001, 2002});
  CHECK(p.row(1)[0] == 8.0);
  CHECK(p.row(1)[2] == 6.0);
  CHECK(diag.str() == "DROPPED B missing=1\n");

  SUBCASE("without the filter a gap is an error naming the entity") {
    CHECK_THROWS_WITH_AS(load(text, long_format(false)), doctest::Contains("'B'"), Error);
  }
}

TEST_CASE("wide missing cells") {
  const std::string text = "entity,1,2,3\nA,1,,3\nB,1,2,3\nC,NA,N/A,3\nD,4,5,6\n";
  PanelLoadOptions filter;
  filter.filter_incomplete = true;
  std::ostringstream diag;
  auto p = load(text, filter, &diag);
  CHECK(p.entities() == std::vector<std::string>{"B", "D"});
  CHECK(diag.str() == "DROPPED A missing=1\nDROPPED C missing=2\n");
  CHECK_THROWS_AS(load(text), Error);
}

TEST_CASE("survivors keep source order") {
  auto p = load("entity,1\nz,1\na,2\nm,3\n");
  CHECK(p.entities() == std::vector<std::string>{"z", "a", "m"});
}

TEST_CASE("quoted labels, CRLF, BOM and tab delimiter") {
  auto p = load("\xEF\xBB\xBF" "entity,2000\r\n\"Korea, South\",55\r\n\"Cote d\"\"Ivoire\",30\r\n");
  CHECK(p.entities() == std::vector<std::string>{"Korea, South", "Cote d\"Ivoire"});

  PanelLoadOptions tab;
  tab.delimiter = '\t';
  auto q = load("entity\t2000\t2001\nHong Kong\t1\t2\nNew Zealand\t3\t4\n", tab);
  CHECK(q.entities() == std::vector<std::string>{"Hong Kong", "New Zealand"});
}

TEST_CASE("load errors") {
  CHECK_THROWS_WITH_AS(load("entity,2000\nA,1,2\nB,3\n"), doctest::Contains("expected 2 fields"), Error);
  CHECK_THROWS_WITH_AS(load("entity,2000\nA,1\nA,3\n"), doctest::Contains("duplicate entity 'A'"), Error);
  CHECK_THROWS_WITH_AS(load("entity,2000\nA,1\nB,x\n"), doctest::Contains("non-numeric value 'x'"), Error);
  CHECK_THROWS_WITH_AS(load("entity,2001,2000\nA,1,2\nB,3,4\n"), doctest::Contains("strictly increasing"), Error);
  CHECK_THROWS_WITH_AS(load("entity,abc\nA,1\nB,3\n"), doctest::Contains("not an integer"), Error);
  CHECK_THROWS_WITH_AS(load("entity,2000\nA,1\n"), doctest::Contains("fewer than 2"), Error);
  CHECK_THROWS_WITH_AS(load("entity,2000\n,1\nB,2\n"), doctest::Contains("empty entity"), Error);
  CHECK_THROWS_WITH_AS(load("entity,2000\nA,inf\nB,2\n"), doctest::Contains("non-numeric"), Error);
  CHECK_THROWS_WITH_AS(load("entity,2000\n\"A,1\nB,2\n"), doctest::Contains("unterminated quote"), Error);
  CHECK_THROWS_AS(load(""), Error);

  PanelLoadOptions filter;
  filter.filter_incomplete = true;
  CHECK_THROWS_WITH_AS(load("entity,1,2\nA,1,\nB,2,3\n", filter), doctest::Contains("fewer than 2"), Error);

  CHECK_THROWS_WITH_AS(load("entity,year,value\nA,2000,1\nA,2000,2\nB,2000,3\n", long_format()),
                       doctest::Contains("duplicate cell for 'A' in 2000"), Error);
  CHECK_THROWS_WITH_AS(load("entity,year,value\nA,2000\n", long_format()), doctest::Contains("expected 3 fields"),
                       Error);
}

TEST_CASE("expected value range") {
  PanelLoadOptions o;
  o.expect_range = parse_value_range("0:100");
  CHECK_NOTHROW(load("entity,1\nA,0\nB,100\n", o));
  CHECK_THROWS_WITH_AS(load("entity,1\nA,0\nB,100.5\n", o), doctest::Contains("outside expected range"), Error);
  CHECK_THROWS_AS(parse_value_range("5"), Error);
  CHECK_THROWS_AS(parse_value_range("9:1"), Error);
}

TEST_CASE("PanelSeries invariants") {
  CHECK_THROWS_AS(PanelSeries({"A"}, {1}, {1.0}), Error);
  CHECK_THROWS_AS(PanelSeries({"A", "B"}, {}, {}), Error);
  CHECK_THROWS_AS(PanelSeries({"A", "B"}, {1}, {1.0}), Error);
  CHECK_THROWS_AS(PanelSeries({"A", "A"}, {1}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(PanelSeries({"A", "B"}, {2, 1}, {1, 2, 3, 4}), Error);
  CHECK_THROWS_AS(PanelSeries({"A", "B"}, {1}, {1.0, std::nan("")}), Error);
}

TEST_CASE("property: wide round trip is bit exact, long and wide agree, filtering is idempotent") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> n_dist(2, 20), t_dist(1, 12);
    // Values spanning many magnitudes exercise the 17-digit text form.
    auto panel = support::random_panel(rng, n_dist(rng), t_dist(rng), -1e-3, 1e6);

    std::ostringstream wide, longform;
    write_panel_wide(wide, panel);
    write_panel_long(longform, panel);
    auto from_wide = load(wide.str());
    CHECK(from_wide == panel);
    CHECK(load(longform.str(), long_format()) == panel);

    PanelLoadOptions filter;
    filter.filter_incomplete = true;
    auto once = load(wide.str(), filter);
    std::ostringstream again;
    write_panel_wide(again, once);
    CHECK(load(again.str(), filter) == once);
  }
}

TEST_CASE("covariates") {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return load_covariate(in);
  };
  auto gdp = read("Malawi,287\nRussia,14090\n");
  CHECK(gdp.size() == 2);
  CHECK(gdp.at("Malawi") == 287.0);
  CHECK(gdp.at("Russia") == 14090.0);

  CHECK(read("entity,value\nMalawi,287\n").size() == 1);
  CHECK(read("").empty());
  CHECK_THROWS_WITH_AS(read("Malawi,287\nMalawi,300\n"), doctest::Contains("'Malawi'"), Error);
  CHECK_THROWS_WITH_AS(read("entity,value\nMalawi,lots\n"), doctest::Contains("non-numeric"), Error);
  CHECK_THROWS_AS(read("Malawi,287,1\n"), Error);
}

TEST_SUITE_END();
