#include "lear/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "lear/errors.hpp"
#include "lear/text.hpp"

namespace lear {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kClockChangeHour = 2;

struct Timestamp {
    Date day;
    int hour;
};

std::optional<Timestamp> parse_timestamp(std::string_view field) {
    field = text::trim(field);
    // YYYY-MM-DDTHH:MM
    if (field.size() != 16 || field[10] != 'T' || field[13] != ':' || field.substr(14) != "00") {
        return std::nullopt;
    }
    const auto hh = field.substr(11, 2);
    if (hh[0] < '0' || hh[0] > '9' || hh[1] < '0' || hh[1] > '9') return std::nullopt;
    const int hour = (hh[0] - '0') * 10 + (hh[1] - '0');
    if (hour > 23) return std::nullopt;
    try {
        return Timestamp{Date::parse(field.substr(0, 10)), hour};
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::string format_timestamp(Date d, int hour) {
    std::string s = d.to_string() + "T";
    s += static_cast<char>('0' + hour / 10);
    s += static_cast<char>('0' + hour % 10);
    s += ":00";
    return s;
}

/// Accumulates parsed cells and enforces uniqueness.
class RecordCollector {
public:
    RecordCollector(const ParseOptions& options, ParseResult& result) : options_(options), result_(result) {}

    void add(std::size_t line, const HourlyRecord& rec) {
        const Key key{rec.day.serial(), rec.hour, index_of(rec.series)};
        auto it = cells_.find(key);
        if (it == cells_.end()) {
            cells_.emplace(key, Cell{rec.value, 1});
            return;
        }
        if (is_fall_back(rec.day) && rec.hour == kClockChangeHour && it->second.count == 1) {
            it->second.sum += rec.value;
            it->second.count = 2;
            return;
        }
        const std::string ts = format_timestamp(rec.day, rec.hour);
        if (!options_.lenient) throw DuplicateTimestamp(ts, std::string(series_name(rec.series)));
        result_.warnings.push_back("line " + std::to_string(line) + ": duplicate " + ts + " " +
                                   std::string(series_name(rec.series)) + " skipped");
    }

    void reject(std::size_t line, const std::string& reason) {
        if (!options_.lenient) throw MalformedRow(line, reason);
        result_.warnings.push_back("line " + std::to_string(line) + ": " + reason + " (skipped)");
    }

    void unknown_series(std::size_t line, const std::string& name) {
        if (!options_.lenient) throw UnknownSeries(name);
        result_.warnings.push_back("line " + std::to_string(line) + ": unknown series '" + name + "' skipped");
    }

    HourlyGrid build() {
        if (cells_.empty()) return HourlyGrid{};
        const Date first{std::get<0>(cells_.begin()->first)};
        const Date last{std::get<0>(cells_.rbegin()->first)};
        HourlyGrid grid(first, static_cast<std::size_t>(last - first + 1));
        for (const auto& [key, cell] : cells_) {
            const auto [serial, hour, series] = key;
            const auto s = static_cast<SeriesId>(series);
            const Date d{serial};
            grid.at(s, d, static_cast<std::size_t>(hour)) = cell.sum / cell.count;
            if (cell.count == 2) {
                result_.dst_adjustments.push_back(format_timestamp(d, hour) + " " + std::string(series_name(s)) +
                                                  " repeated hour averaged");
            }
        }
        fill_spring_forward_gaps(grid);
        return grid;
    }

private:
    using Key = std::tuple<std::int32_t, int, std::size_t>;
    struct Cell {
        double sum;
        int count;
    };

    void fill_spring_forward_gaps(HourlyGrid& grid) {
        for (std::size_t di = 0; di < grid.num_days(); ++di) {
            const Date d = grid.first_day() + static_cast<int>(di);
            if (!is_spring_forward(d)) continue;
            for (SeriesId s : kAllSeries) {
                const double before = grid.at(s, di, kClockChangeHour - 1);
                const double after = grid.at(s, di, kClockChangeHour + 1);
                double& slot = grid.at(s, di, kClockChangeHour);
                if (std::isnan(slot) && std::isfinite(before) && std::isfinite(after)) {
                    slot = 0.5 * (before + after);
                    result_.dst_adjustments.push_back(format_timestamp(d, kClockChangeHour) + " " +
                                                      std::string(series_name(s)) + " skipped hour interpolated");
                }
            }
        }
    }

    const ParseOptions& options_;
    ParseResult& result_;
    std::map<Key, Cell> cells_;
};

void parse_long(std::istream& in, std::size_t& line_no, RecordCollector& collector) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_fields(text::trim(line));
        if (fields.size() != 3) {
            collector.reject(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
            continue;
        }
        const auto ts = parse_timestamp(fields[0]);
        if (!ts) {
            collector.reject(line_no, "unparseable timestamp '" + std::string(fields[0]) + "'");
            continue;
        }
        const auto name = std::string(text::trim(fields[1]));
        const auto series = series_from_name(name);
        if (!series) {
            collector.unknown_series(line_no, name);
            continue;
        }
        const auto value = text::parse_double(fields[2]);
        if (!value) {
            collector.reject(line_no, "non-numeric value '" + std::string(fields[2]) + "'");
            continue;
        }
        collector.add(line_no, HourlyRecord{ts->day, ts->hour, *series, *value});
    }
}

void parse_wide(std::istream& in, const std::vector<std::optional<SeriesId>>& columns, std::size_t& line_no,
                RecordCollector& collector) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto fields = text::split_fields(text::trim(line));
        if (fields.size() != columns.size() + 1) {
            collector.reject(line_no, "expected " + std::to_string(columns.size() + 1) + " fields, got " +
                                          std::to_string(fields.size()));
            continue;
        }
        const auto ts = parse_timestamp(fields[0]);
        if (!ts) {
            collector.reject(line_no, "unparseable timestamp '" + std::string(fields[0]) + "'");
            continue;
        }
        // Validate the whole row before committing any cell.
        std::vector<HourlyRecord> row;
        bool bad = false;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (!columns[c]) continue;
            const auto field = text::trim(fields[c + 1]);
            if (field.empty()) continue;  // missing cell
            const auto value = text::parse_double(field);
            if (!value) {
                collector.reject(line_no, "non-numeric value '" + std::string(field) + "'");
                bad = true;
                break;
            }
            row.push_back(HourlyRecord{ts->day, ts->hour, *columns[c], *value});
        }
        if (bad) continue;
        for (const auto& rec : row) collector.add(line_no, rec);
    }
}

}  // namespace

HourlyGrid::HourlyGrid(Date first_day, std::size_t num_days) : first_day_(first_day), num_days_(num_days) {
    for (auto& v : values_) v.assign(num_days * kHoursPerDay, kNaN);
}

bool HourlyGrid::day_complete(SeriesId s, std::size_t day_index) const {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        if (!std::isfinite(at(s, day_index, h))) return false;
    }
    return true;
}

CsvSchema CsvSchema::long_format() { return CsvSchema{Layout::Long, {}}; }

CsvSchema CsvSchema::wide_format() {
    CsvSchema schema{Layout::Wide, {}};
    for (SeriesId s : kAllSeries) schema.columns.emplace(std::string(series_name(s)), s);
    return schema;
}

CsvSchema detect_schema(const std::string& header_line) {
    if (text::trim(header_line) == "timestamp,series,value") return CsvSchema::long_format();
    return CsvSchema::wide_format();
}

ParseResult parse_csv(std::istream& in, const CsvSchema& schema, const ParseOptions& options) {
    ParseResult result;
    RecordCollector collector(options, result);
    std::string header;
    std::size_t line_no = 0;
    if (!std::getline(in, header)) throw MalformedRow(1, "missing header");
    ++line_no;
    const auto header_fields = text::split_fields(text::trim(header));

    if (schema.layout == CsvSchema::Layout::Long) {
        if (text::trim(header) != "timestamp,series,value") {
            throw MalformedRow(1, "expected header 'timestamp,series,value'");
        }
        parse_long(in, line_no, collector);
    } else {
        if (header_fields.empty() || text::trim(header_fields[0]) != "timestamp") {
            throw MalformedRow(1, "wide header must start with 'timestamp'");
        }
        std::vector<std::optional<SeriesId>> columns;
        for (std::size_t c = 1; c < header_fields.size(); ++c) {
            const auto name = std::string(text::trim(header_fields[c]));
            auto it = schema.columns.find(name);
            if (it == schema.columns.end()) {
                collector.unknown_series(1, name);
                columns.emplace_back(std::nullopt);
            } else {
                columns.emplace_back(it->second);
            }
        }
        parse_wide(in, columns, line_no, collector);
    }
    result.grid = collector.build();
    return result;
}

void write_csv(std::ostream& out, const HourlyGrid& grid) {
    out << "timestamp,series,value\n";
    for (std::size_t di = 0; di < grid.num_days(); ++di) {
        const Date d = grid.first_day() + static_cast<int>(di);
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            const std::string ts = format_timestamp(d, static_cast<int>(h));
            for (SeriesId s : kAllSeries) {
                const double v = grid.at(s, di, h);
                if (!std::isfinite(v)) continue;
                out << ts << ',' << series_name(s) << ',' << text::format_double(v) << '\n';
            }
        }
    }
}

MarketDataset::MarketDataset(HourlyGrid grid, std::vector<ImputationEntry> log)
    : grid_(std::move(grid)), log_(std::move(log)) {
    if (grid_.num_days() == 0) throw std::invalid_argument("MarketDataset: empty grid");
    for (SeriesId s : kAllSeries) {
        for (double v : grid_.series(s)) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("MarketDataset: non-finite cell in " + std::string(series_name(s)));
            }
        }
    }
}

MarketDataset impute_missing_days(const HourlyGrid& raw) {
    HourlyGrid grid = raw;
    std::vector<ImputationEntry> log;
    const std::size_t n = raw.num_days();
    if (n == 0) throw EmptySeries(std::string(series_name(SeriesId::PriceBE)));

    for (SeriesId s : kAllSeries) {
        std::vector<bool> complete(n);
        bool any_value = false;
        for (std::size_t di = 0; di < n; ++di) {
            complete[di] = raw.day_complete(s, di);
            for (std::size_t h = 0; h < kHoursPerDay && !any_value; ++h) {
                any_value = std::isfinite(raw.at(s, di, h));
            }
        }
        if (!any_value) throw EmptySeries(std::string(series_name(s)));

        // Nearest complete day at or before each index, scanning forward.
        std::vector<std::ptrdiff_t> prev(n, -1);
        std::ptrdiff_t last_seen = -1;
        for (std::size_t di = 0; di < n; ++di) {
            if (complete[di]) last_seen = static_cast<std::ptrdiff_t>(di);
            prev[di] = last_seen;
        }
        std::ptrdiff_t next_seen = -1;
        for (std::size_t k = n; k-- > 0;) {
            if (complete[k]) {
                next_seen = static_cast<std::ptrdiff_t>(k);
                continue;
            }
            const Date day = raw.first_day() + static_cast<int>(k);
            if (prev[k] < 0 || next_seen < 0) throw BoundaryGap(day, std::string(series_name(s)));
            const auto before = static_cast<std::size_t>(prev[k]);
            const auto after = static_cast<std::size_t>(next_seen);
            for (std::size_t h = 0; h < kHoursPerDay; ++h) {
                grid.at(s, k, h) = (raw.at(s, before, h) + raw.at(s, after, h)) / 2.0;
            }
            log.push_back({day, s});
        }
    }
    std::sort(log.begin(), log.end(), [](const ImputationEntry& a, const ImputationEntry& b) {
        return a.day != b.day ? a.day < b.day : index_of(a.series) < index_of(b.series);
    });
    return MarketDataset(std::move(grid), std::move(log));
}

ValidationReport validate(const HourlyGrid& grid) {
    ValidationReport report;
    const std::size_t n = grid.num_days();
    std::array<std::size_t, kSeriesCount> finite{};
    for (std::size_t di = 0; di < n; ++di) {
        const Date d = grid.first_day() + static_cast<int>(di);
        bool any = false;
        for (SeriesId s : kAllSeries) {
            for (std::size_t h = 0; h < kHoursPerDay; ++h) {
                if (std::isfinite(grid.at(s, di, h))) {
                    any = true;
                    ++finite[index_of(s)];
                }
            }
        }
        if (!any) {
            report.contiguity_violations.push_back(d);
            continue;
        }
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            for (SeriesId s : kAllSeries) {
                if (!std::isfinite(grid.at(s, di, h))) {
                    report.non_finite.push_back({d, static_cast<int>(h), s});
                }
            }
        }
    }
    const double total = static_cast<double>(n * kHoursPerDay);
    for (std::size_t i = 0; i < kSeriesCount; ++i) {
        report.coverage_percent[i] = total > 0 ? 100.0 * static_cast<double>(finite[i]) / total : 0.0;
    }
    return report;
}

}  // namespace lear
