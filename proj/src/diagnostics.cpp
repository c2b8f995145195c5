#include "lear/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lear/errors.hpp"

namespace lear {

std::vector<ErrorRecord> error_records(const std::vector<ForecastDay>& forecasts) {
    std::vector<ErrorRecord> out;
    for (const auto& f : forecasts) {
        if (!f.actual) continue;
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            out.push_back(ErrorRecord::make(f.target_day, static_cast<int>(h), (*f.actual)[h], f.predicted[h]));
        }
    }
    return out;
}

Metrics compute_metrics(std::span<const ErrorRecord> records) {
    if (records.empty()) throw EmptyInput("compute_metrics needs at least one record");
    double abs_sum = 0.0, sq_sum = 0.0, sum = 0.0, smape_sum = 0.0;
    std::size_t smape_n = 0;
    for (const auto& r : records) {
        abs_sum += std::abs(r.error);
        sq_sum += r.error * r.error;
        sum += r.error;
        const double denom = std::abs(r.actual) + std::abs(r.predicted);
        if (denom >= 1e-6) {
            smape_sum += 2.0 * std::abs(r.error) / denom;
            ++smape_n;
        }
    }
    const double n = static_cast<double>(records.size());
    Metrics m;
    m.count = records.size();
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);
    m.bias = sum / n;
    if (smape_n > 0) m.smape = smape_sum / static_cast<double>(smape_n);
    return m;
}

std::vector<std::pair<double, double>> error_price_points(std::span<const ErrorRecord> records) {
    std::vector<std::pair<double, double>> out;
    out.reserve(records.size());
    for (const auto& r : records) out.emplace_back(r.actual, r.error);
    return out;
}

std::string_view event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::NegativePrice:
            return "NegativePrice";
        case EventKind::LowPrice:
            return "LowPrice";
        case EventKind::Spike:
            return "Spike";
        case EventKind::Normal:
            return "Normal";
    }
    return "";
}

EventLabel label_extremes(const MarketDataset& data, Date day, int hour, const ExtremeThresholds& thresholds) {
    if (thresholds.window_days < 1) throw std::invalid_argument("spike window must be >= 1 day");
    if (hour < 0 || hour >= static_cast<int>(kHoursPerDay)) throw std::invalid_argument("hour out of range");
    const Date first = day - thresholds.window_days;
    if (first < data.first_day()) throw InsufficientHistory(first);
    if (day > data.last_day()) throw InsufficientHistory(first, "no price for " + day.to_string());

    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(thresholds.window_days) * kHoursPerDay);
    for (Date d = first; d < day; ++d) {
        for (std::size_t h = 0; h < kHoursPerDay; ++h) window.push_back(data.price(d, h));
    }
    double sum = 0.0;
    for (double v : window) sum += v;
    const double mean = sum / static_cast<double>(window.size());
    double ss = 0.0;
    for (double v : window) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(window.size()));

    EventLabel label;
    label.rolling_mean = mean;
    label.rolling_sd = sd;
    if (thresholds.low_quantile) {
        const double q = std::clamp(*thresholds.low_quantile, 0.0, 1.0);
        std::vector<double> sorted = window;
        std::sort(sorted.begin(), sorted.end());
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        label.low_threshold = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }

    const double actual = data.price(day, static_cast<std::size_t>(hour));
    if (actual < 0.0) {
        label.kind = EventKind::NegativePrice;
    } else if (label.low_threshold && actual < *label.low_threshold) {
        label.kind = EventKind::LowPrice;
    } else if (actual > mean + thresholds.spike_sigma * sd) {
        label.kind = EventKind::Spike;
    } else {
        label.kind = EventKind::Normal;
    }
    return label;
}

std::vector<EventLabel> label_records(const MarketDataset& data, std::span<const ErrorRecord> records,
                                      const ExtremeThresholds& thresholds) {
    std::vector<EventLabel> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(label_extremes(data, r.day, r.hour, thresholds));
    return out;
}

const SegmentStats& SegmentReport::segment(EventKind k) const {
    for (const auto& s : segments) {
        if (s.kind == k) return s;
    }
    throw std::out_of_range("segment not present");
}

SegmentReport segment_report(std::span<const ErrorRecord> records, std::span<const EventLabel> labels) {
    if (records.size() != labels.size()) throw std::invalid_argument("records and labels are not aligned");
    SegmentReport report;
    report.total = records.size();
    for (EventKind k : kAllEventKinds) {
        std::vector<ErrorRecord> subset;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (labels[i].kind == k) subset.push_back(records[i]);
        }
        SegmentStats stats{k, subset.size(), 0.0, std::nullopt};
        if (report.total > 0) stats.share = static_cast<double>(subset.size()) / static_cast<double>(report.total);
        if (!subset.empty()) stats.metrics = compute_metrics(subset);
        report.segments.push_back(stats);
    }
    const auto& normal = report.segment(EventKind::Normal).metrics;
    const auto& spike = report.segment(EventKind::Spike).metrics;
    const auto& negative = report.segment(EventKind::NegativePrice).metrics;
    if (normal && spike) report.spike_worse_than_normal = spike->mae > normal->mae;
    if (normal && negative) report.negative_worse_than_normal = negative->mae > normal->mae;
    return report;
}

}  // namespace lear
