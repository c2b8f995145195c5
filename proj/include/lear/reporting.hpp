#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lear/attribution.hpp"
#include "lear/diagnostics.hpp"
#include "lear/lear_engine.hpp"
#include "lear/market_data.hpp"

namespace lear::report {

/// `day,hour,actual,predicted`
void write_forecasts_csv(std::ostream& out, const std::vector<ForecastDay>& forecasts);

/// Reads `day,hour,actual,predicted`. Throws MalformedRow.
std::vector<ErrorRecord> read_forecasts_csv(std::istream& in);

/// `day,hour,feature,coefficient,normalized_value,product`
void write_attribution_csv(std::ostream& out, const std::vector<AttributionReport>& reports);

/// `day,hour,family,total` followed by intercept and prediction rows per report.
void write_family_csv(std::ostream& out, const std::vector<AttributionReport>& reports);

/// `actual,error`
void write_error_vs_price_csv(std::ostream& out, const std::vector<std::pair<double, double>>& points);

/// Scatter of error against actual price, with a zero-error reference line.
std::string render_error_scatter_svg(const std::vector<std::pair<double, double>>& points);

nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json segments_to_json(const SegmentReport& report, const ExtremeThresholds& thresholds);
nlohmann::json validation_to_json(const ValidationReport& report, const std::vector<ImputationEntry>& log,
                                  const std::vector<std::string>& warnings,
                                  const std::vector<std::string>& dst_adjustments);

/// Writes `content` to a sibling temp file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

}  // namespace lear::report
