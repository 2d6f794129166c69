#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace panelclust {

/// Complete entity x year panel of index values, stored row-major.
///
/// Invariants (checked on construction): at least two entities, at least one
/// year, unique non-empty labels, strictly increasing years and finite values
/// in every cell.
class PanelSeries {
 public:
  PanelSeries(std::vector<std::string> entities, std::vector<int> years,
              std::vector<double> values);

  std::size_t size() const { return entities_.size(); }
  std::size_t length() const { return years_.size(); }

  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<int>& years() const { return years_; }
  std::span<const double> values() const { return values_; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * length(), length());
  }
  double at(std::size_t i, std::size_t t) const { return values_[i * length() + t]; }

  bool operator==(const PanelSeries&) const = default;

 private:
  std::vector<std::string> entities_;
  std::vector<int> years_;
  std::vector<double> values_;
};

enum class PanelFormat {
  wide,      // entity,<year1>,...,<yearT>
  longform,  // entity,year,value
};

struct ValueRange {
  double lo;
  double hi;
};

struct PanelLoadOptions {
  PanelFormat format = PanelFormat::wide;
  char delimiter = ',';
  // Drop entities with any missing year instead of failing.
  bool filter_incomplete = false;
  std::optional<ValueRange> expect_range;
};

/// Parses a wide or long panel. Dropped entities are reported on
/// `diagnostics` as `DROPPED <label> missing=<count>` lines.
PanelSeries load_panel(std::istream& source, const PanelLoadOptions& options,
                       std::ostream* diagnostics = nullptr);

void write_panel_wide(std::ostream& out, const PanelSeries& panel, char delimiter = ',');
void write_panel_long(std::ostream& out, const PanelSeries& panel, char delimiter = ',');

/// Per-entity scalar such as GDP per capita.
using CovariateMap = std::map<std::string, double>;

/// Two-column `entity,value` file; the header row is optional.
CovariateMap load_covariate(std::istream& source, char delimiter = ',');

/// Parses `lo:hi` as used by `--expect-range`.
ValueRange parse_value_range(std::string_view text);

}  // namespace panelclust
