#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace lear {

/// The six hourly series the forecaster consumes. Order is canonical.
enum class SeriesId : std::size_t {
    PriceBE = 0,
    GenForecastFR,
    LoadForecastFR,
    WindForecastBE,
    SolarForecastBE,
    LoadForecastBE,
};

inline constexpr std::size_t kSeriesCount = 6;
inline constexpr std::size_t kHoursPerDay = 24;

inline constexpr std::array<SeriesId, kSeriesCount> kAllSeries = {
    SeriesId::PriceBE,        SeriesId::GenForecastFR,   SeriesId::LoadForecastFR,
    SeriesId::WindForecastBE, SeriesId::SolarForecastBE, SeriesId::LoadForecastBE,
};

/// Exogenous day-ahead forecasts, i.e. every series except the price.
inline constexpr std::array<SeriesId, kSeriesCount - 1> kExogenousSeries = {
    SeriesId::GenForecastFR,   SeriesId::LoadForecastFR, SeriesId::WindForecastBE,
    SeriesId::SolarForecastBE, SeriesId::LoadForecastBE,
};

constexpr std::size_t index_of(SeriesId s) { return static_cast<std::size_t>(s); }

constexpr std::string_view series_name(SeriesId s) {
    constexpr std::array<std::string_view, kSeriesCount> names = {
        "PriceBE", "GenForecastFR", "LoadForecastFR", "WindForecastBE", "SolarForecastBE", "LoadForecastBE",
    };
    return names[index_of(s)];
}

constexpr std::optional<SeriesId> series_from_name(std::string_view name) {
    for (SeriesId s : kAllSeries) {
        if (series_name(s) == name) return s;
    }
    return std::nullopt;
}

}  // namespace lear
