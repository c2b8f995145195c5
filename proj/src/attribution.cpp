#include "lear/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lear/errors.hpp"

namespace lear {

FamilyKey FamilyKey::of(const FeatureName& name) {
    if (name.family == FeatureFamily::DayOfWeek) return {FeatureFamily::DayOfWeek, std::nullopt};
    return {name.family, name.series};
}

std::string FamilyKey::label() const {
    switch (family) {
        case FeatureFamily::PriceLag:
            return "price";
        case FeatureFamily::Exogenous:
            return std::string(series_name(*series));
        case FeatureFamily::DayOfWeek:
            return "dow";
    }
    return {};
}

double AttributionReport::contribution_sum() const {
    double s = 0.0;
    for (const auto& c : contributions) s += c.product;
    return s;
}

std::vector<FamilyKey> family_keys(const FeatureLayout& layout) {
    std::vector<FamilyKey> keys;
    for (const auto& name : layout.names()) {
        const FamilyKey k = FamilyKey::of(name);
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    return keys;
}

AttributionReport decompose(const LearModelSet& models, const MarketDataset& data, Date target_day, std::size_t hour,
                            const DecomposeOptions& options) {
    if (hour >= kHoursPerDay) throw std::invalid_argument("hour out of range");
    const ForecastDay forecast = predict(models, data, target_day, PredictOptions{options.allow_stale});
    const std::vector<double> x = normalized_row(models, data, target_day);
    const LassoFit& fit = models.fits[hour];

    AttributionReport report;
    report.target_day = target_day;
    report.hour = hour;
    report.method = models.scaler.method;
    report.intercept = fit.intercept;
    report.normalized_prediction = forecast.normalized[hour];
    report.price_prediction = forecast.predicted[hour];
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double beta = fit.coefficients[j];
        if (beta == 0.0 && !options.dense) continue;
        report.contributions.push_back({j, models.layout->name(j), beta, x[j], beta * x[j]});
    }
    report.family_totals = group_by_family(report, *models.layout);
    return report;
}

std::vector<FamilyTotal> group_by_family(const AttributionReport& report, const FeatureLayout& layout) {
    std::vector<FamilyTotal> totals;
    for (const FamilyKey& k : family_keys(layout)) totals.push_back({k, 0.0});
    for (const auto& c : report.contributions) {
        const FamilyKey k = FamilyKey::of(c.feature);
        auto it = std::find_if(totals.begin(), totals.end(), [&](const FamilyTotal& t) { return t.key == k; });
        it->total += c.product;
    }
    return totals;
}

std::vector<Influence> rank_influences(const std::vector<AttributionReport>& reports, const FeatureLayout& layout) {
    if (reports.empty()) throw EmptyInput("rank_influences needs at least one report");
    std::vector<double> sum_abs(layout.size(), 0.0);
    for (const auto& r : reports) {
        for (const auto& c : r.contributions) sum_abs[c.feature_index] += std::abs(c.product);
    }
    std::vector<Influence> out;
    out.reserve(layout.size());
    for (std::size_t j = 0; j < layout.size(); ++j) {
        out.push_back({j, layout.name(j).to_string(), sum_abs[j] / static_cast<double>(reports.size())});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Influence& a, const Influence& b) { return a.mean_abs_product > b.mean_abs_product; });
    return out;
}

std::vector<FamilyInfluence> rank_family_influences(const std::vector<AttributionReport>& reports,
                                                    const FeatureLayout& layout) {
    if (reports.empty()) throw EmptyInput("rank_family_influences needs at least one report");
    const auto keys = family_keys(layout);
    std::vector<FamilyInfluence> out;
    for (const auto& k : keys) out.push_back({k, 0.0});
    for (const auto& r : reports) {
        const auto totals = group_by_family(r, layout);
        for (std::size_t i = 0; i < totals.size(); ++i) out[i].mean_abs_total += std::abs(totals[i].total);
    }
    for (auto& f : out) f.mean_abs_total /= static_cast<double>(reports.size());
    std::stable_sort(out.begin(), out.end(), [](const FamilyInfluence& a, const FamilyInfluence& b) {
        return a.mean_abs_total > b.mean_abs_total;
    });
    return out;
}

}  // namespace lear
