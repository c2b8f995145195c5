#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lear/date.hpp"
#include "lear/features.hpp"
#include "lear/lasso.hpp"
#include "lear/market_data.hpp"
#include "lear/scaling.hpp"

namespace lear {

struct CalibrationConfig {
    int window_days = 365;
    ScalingMethod scaling = ScalingMethod::MedianMadAsinh;
    Criterion criterion = Criterion::BIC;
    LassoOptions lasso;
    PathOptions path;
};

struct CalibrationWindow {
    Date first_day;
    Date last_day;
    int length_days = 0;
};

/// 24 hourly LASSO fits sharing one scaler and one feature layout.
struct LearModelSet {
    std::array<LassoFit, kHoursPerDay> fits;
    ScalerParams scaler;
    const FeatureLayout* layout = &FeatureLayout::standard();
    Date calibrated_for;
    CalibrationWindow window;

    std::string id() const;
    bool all_converged() const;
};

struct ForecastDay {
    Date target_day;
    std::array<double, kHoursPerDay> predicted{};   // EUR/MWh
    std::array<double, kHoursPerDay> normalized{};  // model space, before the inverse transform
    std::optional<std::array<double, kHoursPerDay>> actual;
    std::string model_ref;
    bool not_converged = false;
};

/// Fits the scaler and 24 per-hour LASSO models on [target_day - window_days, target_day - 1].
/// The hourly fits run in parallel under Execution::Parallel.
LearModelSet calibrate(const MarketDataset& data, Date target_day, const CalibrationConfig& config = {},
                       Execution exec = Execution::Parallel);

struct PredictOptions {
    /// Accept a model calibrated for an earlier day (periodic recalibration).
    bool allow_stale = false;
};

/// Throws ModelDateMismatch unless the model was calibrated for `target_day`
/// (or an earlier day with allow_stale).
ForecastDay predict(const LearModelSet& models, const MarketDataset& data, Date target_day,
                    const PredictOptions& options = {});

/// Normalized feature row the models consume for `target_day`.
std::vector<double> normalized_row(const LearModelSet& models, const MarketDataset& data, Date target_day);

struct BacktestConfig {
    CalibrationConfig calibration;
    int recalib_every = 1;
};

struct BacktestResult {
    std::vector<ForecastDay> forecasts;
    std::size_t calibrations = 0;
    std::vector<std::string> warnings;
};

using SnapshotSink = std::function<void(const LearModelSet&)>;

/// Day-by-day forecasts over [start_day, end_day], recalibrating on days where
/// (d - start_day) % recalib_every == 0.
BacktestResult rolling_backtest(const MarketDataset& data, Date start_day, Date end_day,
                                const BacktestConfig& config = {}, const SnapshotSink& on_calibrated = {},
                                Execution exec = Execution::Parallel);

/// First day a backtest with this window can forecast.
Date earliest_feasible_start(const MarketDataset& data, int window_days,
                             const FeatureLayout& layout = FeatureLayout::standard());

nlohmann::json snapshot_to_json(const LearModelSet& models);
LearModelSet snapshot_from_json(const nlohmann::json& j, const FeatureLayout& layout = FeatureLayout::standard());

}  // namespace lear
