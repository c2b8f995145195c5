#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lear/date.hpp"
#include "lear/market_data.hpp"
#include "lear/matrix.hpp"
#include "lear/series.hpp"

namespace lear {

enum class FeatureFamily { PriceLag, Exogenous, DayOfWeek };

struct FeatureName {
    FeatureFamily family = FeatureFamily::PriceLag;
    std::optional<SeriesId> series;  // absent for DayOfWeek
    int lag_days = 0;
    int hour = 0;     // unused for DayOfWeek
    int weekday = 0;  // DayOfWeek only, 0 = Monday

    /// `price.lag{L}.h{H}`, `{series}.lag{L}.h{H}` or `dow.{k}`.
    std::string to_string() const;

    bool operator==(const FeatureName&) const = default;
};

/// Canonical feature ordering: price lags (lag, hour), then exogenous series
/// (series, lag, hour), then seven weekday dummies.
class FeatureLayout {
public:
    FeatureLayout(std::vector<int> price_lags, std::vector<SeriesId> exogenous, std::vector<int> exogenous_lags);

    /// Lags 1, 2, 3, 7 for the price; lags 0, 1, 7 for the five exogenous forecasts.
    static const FeatureLayout& standard();

    std::size_t size() const { return names_.size(); }
    std::size_t price_block_size() const { return price_lags_.size() * kHoursPerDay; }
    std::size_t exogenous_block_size() const { return exogenous_.size() * exogenous_lags_.size() * kHoursPerDay; }
    std::size_t dummy_offset() const { return price_block_size() + exogenous_block_size(); }
    static constexpr std::size_t kDummyCount = 7;

    /// Largest lag in days; a row for day d reads data from d - max_lag().
    int max_lag() const;

    const std::vector<FeatureName>& names() const { return names_; }
    const FeatureName& name(std::size_t index) const { return names_[index]; }
    std::optional<std::size_t> find(const std::string& serialized) const;

    bool is_dummy(std::size_t index) const { return index >= dummy_offset(); }

    const std::vector<int>& price_lags() const { return price_lags_; }
    const std::vector<SeriesId>& exogenous() const { return exogenous_; }
    const std::vector<int>& exogenous_lags() const { return exogenous_lags_; }

private:
    std::vector<int> price_lags_;
    std::vector<SeriesId> exogenous_;
    std::vector<int> exogenous_lags_;
    std::vector<FeatureName> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct FeatureVector {
    Date target_day;
    std::vector<double> values;
};

struct DesignMatrix {
    Matrix rows;  // one row per day, columns in layout order
    std::array<std::vector<double>, kHoursPerDay> targets;
    const FeatureLayout* layout = nullptr;
    Date first_day;
    Date last_day;

    std::size_t num_rows() const { return rows.rows(); }
};

/// One-hot weekday vector, Monday at index 0.
std::array<double, 7> day_of_week_dummy(Date d);

/// Features for predicting `target_day`. Prices are read up to target_day - 1;
/// exogenous forecasts up to target_day. Throws InsufficientHistory.
FeatureVector build_row(const MarketDataset& data, Date target_day,
                        const FeatureLayout& layout = FeatureLayout::standard());

/// Writes the row into `out` (size layout.size()) without allocating.
void build_row_into(const MarketDataset& data, Date target_day, const FeatureLayout& layout, std::span<double> out);

/// Rows and hourly price targets for every day of [first_day, last_day].
DesignMatrix build_training_set(const MarketDataset& data, Date first_day, Date last_day,
                                const FeatureLayout& layout = FeatureLayout::standard(),
                                Execution exec = Execution::Parallel);

}  // namespace lear
