#include "lear/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "lear/errors.hpp"

namespace lear {

std::string FeatureName::to_string() const {
    switch (family) {
        case FeatureFamily::PriceLag:
            return "price.lag" + std::to_string(lag_days) + ".h" + std::to_string(hour);
        case FeatureFamily::Exogenous:
            return std::string(series_name(*series)) + ".lag" + std::to_string(lag_days) + ".h" +
                   std::to_string(hour);
        case FeatureFamily::DayOfWeek:
            return "dow." + std::to_string(weekday);
    }
    return {};
}

FeatureLayout::FeatureLayout(std::vector<int> price_lags, std::vector<SeriesId> exogenous,
                             std::vector<int> exogenous_lags)
    : price_lags_(std::move(price_lags)), exogenous_(std::move(exogenous)), exogenous_lags_(std::move(exogenous_lags)) {
    for (int lag : price_lags_) {
        if (lag < 1) throw std::invalid_argument("price lags must be >= 1");
    }
    for (int lag : exogenous_lags_) {
        if (lag < 0) throw std::invalid_argument("exogenous lags must be >= 0");
    }
    for (int lag : price_lags_) {
        for (int h = 0; h < static_cast<int>(kHoursPerDay); ++h) {
            names_.push_back({FeatureFamily::PriceLag, SeriesId::PriceBE, lag, h, 0});
        }
    }
    for (SeriesId s : exogenous_) {
        for (int lag : exogenous_lags_) {
            for (int h = 0; h < static_cast<int>(kHoursPerDay); ++h) {
                names_.push_back({FeatureFamily::Exogenous, s, lag, h, 0});
            }
        }
    }
    for (int k = 0; k < static_cast<int>(kDummyCount); ++k) {
        names_.push_back({FeatureFamily::DayOfWeek, std::nullopt, 0, 0, k});
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i].to_string(), i).second) {
            throw std::invalid_argument("duplicate feature " + names_[i].to_string());
        }
    }
}

const FeatureLayout& FeatureLayout::standard() {
    static const FeatureLayout layout({1, 2, 3, 7}, {kExogenousSeries.begin(), kExogenousSeries.end()}, {0, 1, 7});
    return layout;
}

int FeatureLayout::max_lag() const {
    int m = 0;
    for (int lag : price_lags_) m = std::max(m, lag);
    for (int lag : exogenous_lags_) m = std::max(m, lag);
    return m;
}

std::optional<std::size_t> FeatureLayout::find(const std::string& serialized) const {
    auto it = index_.find(serialized);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::array<double, 7> day_of_week_dummy(Date d) {
    std::array<double, 7> z{};
    z[static_cast<std::size_t>(d.weekday())] = 1.0;
    return z;
}

void build_row_into(const MarketDataset& data, Date target_day, const FeatureLayout& layout, std::span<double> out) {
    if (out.size() != layout.size()) throw LengthMismatch(layout.size(), out.size());
    const Date first_required = target_day - layout.max_lag();
    if (first_required < data.first_day()) throw InsufficientHistory(first_required);
    if (target_day > data.last_day()) {
        throw InsufficientHistory(first_required, "no data for target day " + target_day.to_string() +
                                                      " (dataset ends " + data.last_day().to_string() + ")");
    }
    const HourlyGrid& grid = data.grid();
    std::size_t k = 0;
    for (int lag : layout.price_lags()) {
        const std::size_t di = grid.day_index(target_day - lag);
        for (std::size_t h = 0; h < kHoursPerDay; ++h) out[k++] = grid.at(SeriesId::PriceBE, di, h);
    }
    for (SeriesId s : layout.exogenous()) {
        for (int lag : layout.exogenous_lags()) {
            const std::size_t di = grid.day_index(target_day - lag);
            for (std::size_t h = 0; h < kHoursPerDay; ++h) out[k++] = grid.at(s, di, h);
        }
    }
    for (double z : day_of_week_dummy(target_day)) out[k++] = z;
}

FeatureVector build_row(const MarketDataset& data, Date target_day, const FeatureLayout& layout) {
    FeatureVector row{target_day, std::vector<double>(layout.size())};
    build_row_into(data, target_day, layout, row.values);
    return row;
}

DesignMatrix build_training_set(const MarketDataset& data, Date first_day, Date last_day, const FeatureLayout& layout,
                                Execution exec) {
    if (last_day < first_day) throw std::invalid_argument("empty training window");
    const Date first_required = first_day - layout.max_lag();
    if (first_required < data.first_day()) throw InsufficientHistory(first_required);
    if (last_day > data.last_day()) {
        throw InsufficientHistory(first_required, "training window ends " + last_day.to_string() +
                                                      " after dataset end " + data.last_day().to_string());
    }
    const std::size_t n = static_cast<std::size_t>(last_day - first_day + 1);
    const std::size_t p = layout.size();

    DesignMatrix dm;
    dm.layout = &layout;
    dm.first_day = first_day;
    dm.last_day = last_day;
    dm.rows = Matrix(n, p);
    for (auto& t : dm.targets) t.resize(n);

    auto fill_day = [&](std::size_t i, std::vector<double>& buffer) {
        const Date d = first_day + static_cast<int>(i);
        build_row_into(data, d, layout, buffer);
        for (std::size_t j = 0; j < p; ++j) dm.rows(i, j) = buffer[j];
        for (std::size_t h = 0; h < kHoursPerDay; ++h) dm.targets[h][i] = data.price(d, h);
    };

    if (exec == Execution::Serial) {
        std::vector<double> buffer(p);
        for (std::size_t i = 0; i < n; ++i) fill_day(i, buffer);
    } else {
#pragma omp parallel
        {
            std::vector<double> buffer(p);
#pragma omp for schedule(static)
            for (std::size_t i = 0; i < n; ++i) fill_day(i, buffer);
        }
    }
    return dm;
}

}  // namespace lear
