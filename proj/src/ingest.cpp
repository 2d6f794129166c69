#include "panelclust/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "csv.hpp"
#include "panelclust/error.hpp"

namespace panelclust {
namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// %.17g keeps every double bit-exact through a text round trip.
std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Row-wise staging area shared by both layouts before the completeness check.
struct Staged {
  std::vector<std::string> entities;
  std::vector<int> years;
  std::vector<std::vector<std::optional<double>>> cells;  // [entity][year]
};

std::optional<double> parse_cell(const std::string& field, std::size_t line) {
  if (csv::is_missing(field)) return std::nullopt;
  auto value = csv::parse_double(field);
  if (!value) throw Error(at_line(line) + "non-numeric value '" + field + "'");
  return value;
}

void check_label(const std::string& label, std::size_t line) {
  if (label.empty()) throw Error(at_line(line) + "empty entity label");
}

Staged stage_wide(const std::vector<csv::Record>& records) {
  if (records.empty()) throw Error("panel is empty");
  const auto& header = records.front();
  if (header.fields.size() < 2) throw Error(at_line(header.line) + "header needs at least one year column");
  Staged staged;
  for (std::size_t c = 1; c < header.fields.size(); ++c) {
    auto year = csv::parse_int(header.fields[c]);
    if (!year) throw Error(at_line(header.line) + "year column '" + header.fields[c] + "' is not an integer");
    if (!staged.years.empty() && *year <= staged.years.back()) {
      throw Error(at_line(header.line) + "years must be strictly increasing at '" + header.fields[c] + "'");
    }
    staged.years.push_back(*year);
  }
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.fields.size()) {
      throw Error(at_line(rec.line) + "expected " + std::to_string(header.fields.size()) +
                  " fields, found " + std::to_string(rec.fields.size()));
    }
    const std::string& label = rec.fields.front();
    check_label(label, rec.line);
    if (!seen.insert(label).second) throw Error(at_line(rec.line) + "duplicate entity '" + label + "'");
    staged.entities.push_back(label);
    auto& row = staged.cells.emplace_back();
    for (std::size_t c = 1; c < rec.fields.size(); ++c) row.push_back(parse_cell(rec.fields[c], rec.line));
  }
  return staged;
}

Staged stage_long(const std::vector<csv::Record>& records) {
  struct Cell {
    std::size_t entity;
    int year;
    std::optional<double> value;
  };
  std::vector<Cell> cells;
  Staged staged;
  std::unordered_map<std::string, std::size_t> entity_index;
  std::set<std::pair<std::size_t, int>> seen;
  std::set<int> years;

  std::size_t first = 0;
  if (!records.empty() && records.front().fields.size() == 3 &&
      !csv::parse_int(records.front().fields[1])) {
    first = 1;  // header row
  }
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 3) {
      throw Error(at_line(rec.line) + "expected 3 fields (entity,year,value), found " +
                  std::to_string(rec.fields.size()));
    }
    const std::string& label = rec.fields[0];
    check_label(label, rec.line);
    auto year = csv::parse_int(rec.fields[1]);
    if (!year) throw Error(at_line(rec.line) + "year '" + rec.fields[1] + "' is not an integer");
    auto [it, inserted] = entity_index.emplace(label, staged.entities.size());
    if (inserted) staged.entities.push_back(label);
    if (!seen.emplace(it->second, *year).second) {
      throw Error(at_line(rec.line) + "duplicate cell for '" + label + "' in " + std::to_string(*year));
    }
    years.insert(*year);
    cells.push_back({it->second, *year, parse_cell(rec.fields[2], rec.line)});
  }
  staged.years.assign(years.begin(), years.end());
  staged.cells.assign(staged.entities.size(),
                      std::vector<std::optional<double>>(staged.years.size()));
  for (const auto& cell : cells) {
    auto t = std::lower_bound(staged.years.begin(), staged.years.end(), cell.year) - staged.years.begin();
    staged.cells[cell.entity][static_cast<std::size_t>(t)] = cell.value;
  }
  return staged;
}

}  // namespace

PanelSeries::PanelSeries(std::vector<std::string> entities, std::vector<int> years,
                         std::vector<double> values)
    : entities_(std::move(entities)), years_(std::move(years)), values_(std::move(values)) {
  if (entities_.size() < 2) {
    throw Error("panel needs at least 2 entities, found " + std::to_string(entities_.size()));
  }
  if (years_.empty()) throw Error("panel needs at least one year");
  if (values_.size() != entities_.size() * years_.size()) {
    throw Error("panel value count does not match entities x years");
  }
  std::unordered_set<std::string> seen;
  for (const auto& e : entities_) {
    if (e.empty()) throw Error("empty entity label");
    if (!seen.insert(e).second) throw Error("duplicate entity '" + e + "'");
  }
  for (std::size_t t = 1; t < years_.size(); ++t) {
    if (years_[t] <= years_[t - 1]) throw Error("years must be strictly increasing");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error("non-finite value for '" + entities_[i / years_.size()] + "' in " +
                  std::to_string(years_[i % years_.size()]));
    }
  }
}

PanelSeries load_panel(std::istream& source, const PanelLoadOptions& options,
                       std::ostream* diagnostics) {
  auto records = csv::read_records(source, options.delimiter);
  Staged staged = options.format == PanelFormat::wide ? stage_wide(records) : stage_long(records);

  std::vector<std::string> entities;
  std::vector<double> values;
  for (std::size_t i = 0; i < staged.entities.size(); ++i) {
    const auto& row = staged.cells[i];
    auto missing = static_cast<std::size_t>(std::count(row.begin(), row.end(), std::nullopt));
    if (missing > 0) {
      if (!options.filter_incomplete) {
        auto t = std::find(row.begin(), row.end(), std::nullopt) - row.begin();
        throw Error("missing value for '" + staged.entities[i] + "' in " +
                    std::to_string(staged.years[static_cast<std::size_t>(t)]));
      }
      if (diagnostics) *diagnostics << "DROPPED " << staged.entities[i] << " missing=" << missing << '\n';
      continue;
    }
    entities.push_back(staged.entities[i]);
    for (const auto& cell : row) {
      double v = *cell;
      if (options.expect_range && (v < options.expect_range->lo || v > options.expect_range->hi)) {
        throw Error("value " + format_value(v) + " for '" + staged.entities[i] +
                    "' outside expected range " + format_value(options.expect_range->lo) + ":" +
                    format_value(options.expect_range->hi));
      }
      values.push_back(v);
    }
  }
  if (entities.size() < 2) {
    throw Error("fewer than 2 complete entities (" + std::to_string(entities.size()) + ")");
  }
  return PanelSeries(std::move(entities), std::move(staged.years), std::move(values));
}

void write_panel_wide(std::ostream& out, const PanelSeries& panel, char delimiter) {
  out << "entity";
  for (int y : panel.years()) out << delimiter << y;
  out << '\n';
  for (std::size_t i = 0; i < panel.size(); ++i) {
    out << csv::escape_field(panel.entities()[i], delimiter);
    for (double v : panel.row(i)) out << delimiter << format_value(v);
    out << '\n';
  }
}

void write_panel_long(std::ostream& out, const PanelSeries& panel, char delimiter) {
  out << "entity" << delimiter << "year" << delimiter << "value\n";
  for (std::size_t i = 0; i < panel.size(); ++i) {
    for (std::size_t t = 0; t < panel.length(); ++t) {
      out << csv::escape_field(panel.entities()[i], delimiter) << delimiter << panel.years()[t]
          << delimiter << format_value(panel.at(i, t)) << '\n';
    }
  }
}

CovariateMap load_covariate(std::istream& source, char delimiter) {
  auto records = csv::read_records(source, delimiter);
  CovariateMap map;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 2) {
      throw Error(at_line(rec.line) + "expected 2 fields (entity,value), found " +
                  std::to_string(rec.fields.size()));
    }
    auto value = csv::parse_double(rec.fields[1]);
    if (!value) {
      if (r == 0) continue;  // header
      throw Error(at_line(rec.line) + "non-numeric value '" + rec.fields[1] + "'");
    }
    check_label(rec.fields[0], rec.line);
    if (!map.emplace(rec.fields[0], *value).second) {
      throw Error(at_line(rec.line) + "duplicate label '" + rec.fields[0] + "'");
    }
  }
  return map;
}

ValueRange parse_value_range(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw Error("range must be lo:hi, got '" + std::string(text) + "'");
  auto lo = csv::parse_double(text.substr(0, colon));
  auto hi = csv::parse_double(text.substr(colon + 1));
  if (!lo || !hi || *lo > *hi) throw Error("invalid range '" + std::string(text) + "'");
  return {*lo, *hi};
}

}  // namespace panelclust
