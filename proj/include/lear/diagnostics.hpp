#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lear/date.hpp"
#include "lear/lear_engine.hpp"
#include "lear/market_data.hpp"

namespace lear {

struct ErrorRecord {
    Date day;
    int hour = 0;
    double actual = 0.0;
    double predicted = 0.0;
    double error = 0.0;  // actual - predicted

    static ErrorRecord make(Date day, int hour, double actual, double predicted) {
        return {day, hour, actual, predicted, actual - predicted};
    }
    bool operator==(const ErrorRecord&) const = default;
};

/// Flattens forecasts that carry actuals into per-hour error records.
std::vector<ErrorRecord> error_records(const std::vector<ForecastDay>& forecasts);

struct Metrics {
    std::size_t count = 0;
    double mae = 0.0;
    double rmse = 0.0;
    std::optional<double> smape;  // empty when every denominator is below 1e-6
    double bias = 0.0;
};

/// Throws EmptyInput.
Metrics compute_metrics(std::span<const ErrorRecord> records);

/// (actual price, error) pairs, one per record.
std::vector<std::pair<double, double>> error_price_points(std::span<const ErrorRecord> records);

enum class EventKind { NegativePrice, LowPrice, Spike, Normal };
inline constexpr std::array<EventKind, 4> kAllEventKinds = {EventKind::NegativePrice, EventKind::LowPrice,
                                                            EventKind::Spike, EventKind::Normal};

std::string_view event_kind_name(EventKind k);

struct ExtremeThresholds {
    int window_days = 30;
    double spike_sigma = 3.0;
    /// Adds a LowPrice segment for non-negative prices below this quantile of the trailing window.
    std::optional<double> low_quantile;
};

struct EventLabel {
    EventKind kind = EventKind::Normal;
    double rolling_mean = 0.0;
    double rolling_sd = 0.0;  // population
    std::optional<double> low_threshold;
};

/// Labels the actual price at (day, hour) against the trailing window of whole days
/// [day - window_days, day - 1]. Negative wins over spike; the spike test is strict.
/// Throws InsufficientHistory.
EventLabel label_extremes(const MarketDataset& data, Date day, int hour, const ExtremeThresholds& thresholds = {});

std::vector<EventLabel> label_records(const MarketDataset& data, std::span<const ErrorRecord> records,
                                      const ExtremeThresholds& thresholds = {});

struct SegmentStats {
    EventKind kind;
    std::size_t count = 0;
    double share = 0.0;
    std::optional<Metrics> metrics;  // empty when count == 0
};

struct SegmentReport {
    std::vector<SegmentStats> segments;  // every kind, in kAllEventKinds order
    std::size_t total = 0;
    std::optional<bool> spike_worse_than_normal;
    std::optional<bool> negative_worse_than_normal;

    const SegmentStats& segment(EventKind k) const;
};

/// Throws std::invalid_argument when records and labels differ in length.
SegmentReport segment_report(std::span<const ErrorRecord> records, std::span<const EventLabel> labels);

}  // namespace lear
