#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "lear/date.hpp"
#include "lear/series.hpp"

namespace lear {

struct HourlyRecord {
    Date day;
    int hour = 0;  // 0..23, local market time
    SeriesId series = SeriesId::PriceBE;
    double value = 0.0;
};

/// Dense (day, hour) grid per series. Missing cells are NaN.
class HourlyGrid {
public:
    HourlyGrid() = default;
    HourlyGrid(Date first_day, std::size_t num_days);

    Date first_day() const { return first_day_; }
    Date last_day() const { return first_day_ + static_cast<int>(num_days_) - 1; }
    std::size_t num_days() const { return num_days_; }
    bool contains(Date d) const { return d >= first_day_ && d <= last_day(); }

    double& at(SeriesId s, std::size_t day_index, std::size_t hour) {
        return values_[index_of(s)][day_index * kHoursPerDay + hour];
    }
    double at(SeriesId s, std::size_t day_index, std::size_t hour) const {
        return values_[index_of(s)][day_index * kHoursPerDay + hour];
    }
    double& at(SeriesId s, Date d, std::size_t hour) { return at(s, day_index(d), hour); }
    double at(SeriesId s, Date d, std::size_t hour) const { return at(s, day_index(d), hour); }

    std::size_t day_index(Date d) const { return static_cast<std::size_t>(d - first_day_); }

    /// Row-major (day, hour) buffer for one series.
    const std::vector<double>& series(SeriesId s) const { return values_[index_of(s)]; }
    std::vector<double>& series(SeriesId s) { return values_[index_of(s)]; }

    /// True when all 24 hours of the day are finite for the series.
    bool day_complete(SeriesId s, std::size_t day_index) const;

    bool operator==(const HourlyGrid&) const = default;

private:
    Date first_day_;
    std::size_t num_days_ = 0;
    std::array<std::vector<double>, kSeriesCount> values_;
};

/// Column layout of an input CSV.
struct CsvSchema {
    enum class Layout { Long, Wide };
    Layout layout = Layout::Long;
    /// Wide layout: header column name -> series. Long layout ignores it.
    std::map<std::string, SeriesId> columns;

    static CsvSchema long_format();
    static CsvSchema wide_format();
};

struct ParseOptions {
    /// Skip malformed, duplicate and unknown-series rows with a warning instead of failing.
    bool lenient = false;
};

struct ParseResult {
    HourlyGrid grid;
    std::vector<std::string> warnings;
    /// Clock-change cells folded into the 24-slot grid.
    std::vector<std::string> dst_adjustments;
};

/// Reads hourly records into a raw grid spanning the first to the last timestamp seen.
/// On the spring-forward day a missing 02:00 slot is filled from its two neighbours;
/// on the fall-back day a repeated 02:00 slot is averaged.
ParseResult parse_csv(std::istream& in, const CsvSchema& schema = CsvSchema::long_format(),
                      const ParseOptions& options = {});

/// Picks Long or Wide from the header line.
CsvSchema detect_schema(const std::string& header_line);

/// Writes every finite cell in long format, ordered by day, hour, series.
void write_csv(std::ostream& out, const HourlyGrid& grid);

struct ImputationEntry {
    Date day;
    SeriesId series;
    bool operator==(const ImputationEntry&) const = default;
};

/// Gap-free, fully finite hourly dataset. Immutable once built.
class MarketDataset {
public:
    /// Throws std::invalid_argument when any cell is non-finite.
    explicit MarketDataset(HourlyGrid grid, std::vector<ImputationEntry> log = {});

    const HourlyGrid& grid() const { return grid_; }
    const std::vector<ImputationEntry>& imputation_log() const { return log_; }

    Date first_day() const { return grid_.first_day(); }
    Date last_day() const { return grid_.last_day(); }
    std::size_t num_days() const { return grid_.num_days(); }
    bool contains(Date d) const { return grid_.contains(d); }

    double value(SeriesId s, Date d, std::size_t hour) const { return grid_.at(s, d, hour); }
    double price(Date d, std::size_t hour) const { return grid_.at(SeriesId::PriceBE, d, hour); }

private:
    HourlyGrid grid_;
    std::vector<ImputationEntry> log_;
};

/// Replaces each incomplete day of each series, hour by hour, with the mean of the
/// nearest fully present day before and after it.
/// Throws BoundaryGap when one side has no complete day, EmptySeries when a series has no data.
MarketDataset impute_missing_days(const HourlyGrid& raw);

struct CellIssue {
    Date day;
    int hour;
    SeriesId series;
};

struct ValidationReport {
    /// Dates inside the range with no data for any series.
    std::vector<Date> contiguity_violations;
    /// Non-finite cells, excluding those on contiguity-violation dates.
    std::vector<CellIssue> non_finite;
    /// Percentage of finite cells per series.
    std::array<double, kSeriesCount> coverage_percent{};

    bool ok() const { return contiguity_violations.empty() && non_finite.empty(); }
};

ValidationReport validate(const HourlyGrid& grid);

}  // namespace lear
