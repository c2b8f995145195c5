#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lear/features.hpp"
#include "lear/lear_engine.hpp"
#include "lear/scaling.hpp"

namespace lear {

struct Contribution {
    std::size_t feature_index = 0;
    FeatureName feature;
    double coefficient = 0.0;
    double feature_value_normalized = 0.0;
    double product = 0.0;
};

/// Feature group used for totals: the price lags, each exogenous series, or the weekday dummies.
struct FamilyKey {
    FeatureFamily family = FeatureFamily::PriceLag;
    std::optional<SeriesId> series;

    static FamilyKey of(const FeatureName& name);
    std::string label() const;  // "price", "<series>", "dow"
    bool operator==(const FamilyKey&) const = default;
};

struct FamilyTotal {
    FamilyKey key;
    double total = 0.0;
};

/// Per-feature decomposition of one hourly prediction in model (normalized) space.
/// Σ product + intercept = normalized_prediction; price_prediction is its inverse transform.
/// Price-space bars only add up when `method` is ZScore.
struct AttributionReport {
    Date target_day;
    std::size_t hour = 0;
    ScalingMethod method = ScalingMethod::MedianMadAsinh;
    std::vector<Contribution> contributions;
    double intercept = 0.0;
    double normalized_prediction = 0.0;
    double price_prediction = 0.0;
    std::vector<FamilyTotal> family_totals;

    double contribution_sum() const;
};

struct DecomposeOptions {
    /// Emit every feature, including zero coefficients.
    bool dense = false;
    /// Accept a model calibrated for an earlier day.
    bool allow_stale = false;
};

AttributionReport decompose(const LearModelSet& models, const MarketDataset& data, Date target_day, std::size_t hour,
                            const DecomposeOptions& options = {});

/// Sums products per family in canonical family order; every family is listed.
std::vector<FamilyTotal> group_by_family(const AttributionReport& report,
                                         const FeatureLayout& layout = FeatureLayout::standard());

struct Influence {
    std::size_t feature_index;
    std::string name;
    double mean_abs_product;
};

/// Features ranked by mean |product| over the reports (absent = 0); ties keep canonical order.
std::vector<Influence> rank_influences(const std::vector<AttributionReport>& reports,
                                       const FeatureLayout& layout = FeatureLayout::standard());

struct FamilyInfluence {
    FamilyKey key;
    double mean_abs_total;
};

/// Families ranked by mean |family total| over the reports.
std::vector<FamilyInfluence> rank_family_influences(const std::vector<AttributionReport>& reports,
                                                    const FeatureLayout& layout = FeatureLayout::standard());

/// Canonical family order for a layout.
std::vector<FamilyKey> family_keys(const FeatureLayout& layout);

}  // namespace lear
