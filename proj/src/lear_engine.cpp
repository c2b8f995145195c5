#include "lear/lear_engine.hpp"

#include <exception>
#include <stdexcept>

#include "lear/errors.hpp"

namespace lear {

std::string LearModelSet::id() const {
    return calibrated_for.to_string() + "/w" + std::to_string(window.length_days);
}

bool LearModelSet::all_converged() const {
    for (const auto& f : fits) {
        if (!f.converged) return false;
    }
    return true;
}

LearModelSet calibrate(const MarketDataset& data, Date target_day, const CalibrationConfig& config, Execution exec) {
    if (config.window_days < 2) throw std::invalid_argument("calibration window must span at least two days");
    const FeatureLayout& layout = FeatureLayout::standard();
    const Date first = target_day - config.window_days;
    const Date last = target_day - 1;

    DesignMatrix dm = build_training_set(data, first, last, layout, exec);

    LearModelSet models;
    models.layout = &layout;
    models.calibrated_for = target_day;
    models.window = {first, last, config.window_days};
    models.scaler = fit_scaler(dm, config.scaling);

    Matrix scaled = std::move(dm.rows);
    for (std::size_t j = 0; j < scaled.cols(); ++j) {
        if (models.scaler.passthrough[j]) continue;
        const double loc = models.scaler.feature_location[j];
        const double scale = models.scaler.feature_scale[j];
        for (double& v : scaled.col(j)) v = forward(config.scaling, v, loc, scale);
    }
    const LassoDesign design(std::move(scaled), exec);

    auto fit_hour = [&](std::size_t h) {
        std::vector<double> y(dm.targets[h].size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = transform_target(models.scaler, h, dm.targets[h][i]);
        models.fits[h] =
            select_lambda(design, y, config.criterion, config.lasso, config.path).fit;
    };

    if (exec == Execution::Serial) {
        for (std::size_t h = 0; h < kHoursPerDay; ++h) fit_hour(h);
    } else {
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            try {
                fit_hour(h);
            } catch (...) {
#pragma omp critical(lear_calibrate_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    return models;
}

std::vector<double> normalized_row(const LearModelSet& models, const MarketDataset& data, Date target_day) {
    std::vector<double> row = build_row(data, target_day, *models.layout).values;
    transform_in_place(models.scaler, row);
    return row;
}

ForecastDay predict(const LearModelSet& models, const MarketDataset& data, Date target_day,
                    const PredictOptions& options) {
    const bool exact = models.calibrated_for == target_day;
    const bool stale_ok = options.allow_stale && models.calibrated_for < target_day;
    if (!exact && !stale_ok) throw ModelDateMismatch(models.calibrated_for, target_day);

    const std::vector<double> x = normalized_row(models, data, target_day);
    ForecastDay out;
    out.target_day = target_day;
    out.model_ref = models.id();
    out.not_converged = !models.all_converged();
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        const auto& beta = models.fits[h].coefficients;
        double sum = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (beta[j] != 0.0) sum += beta[j] * x[j];
        }
        out.normalized[h] = sum + models.fits[h].intercept;
        out.predicted[h] = inverse_transform_target(models.scaler, h, out.normalized[h]);
    }
    std::array<double, kHoursPerDay> actual{};
    for (std::size_t h = 0; h < kHoursPerDay; ++h) actual[h] = data.price(target_day, h);
    out.actual = actual;
    return out;
}

Date earliest_feasible_start(const MarketDataset& data, int window_days, const FeatureLayout& layout) {
    return data.first_day() + window_days + layout.max_lag();
}

BacktestResult rolling_backtest(const MarketDataset& data, Date start_day, Date end_day, const BacktestConfig& config,
                                const SnapshotSink& on_calibrated, Execution exec) {
    if (end_day < start_day) throw std::invalid_argument("backtest end precedes start");
    if (config.recalib_every < 1) throw std::invalid_argument("recalib_every must be >= 1");
    const Date feasible = earliest_feasible_start(data, config.calibration.window_days);
    if (start_day < feasible) {
        throw InsufficientHistory(start_day - config.calibration.window_days - FeatureLayout::standard().max_lag(),
                                  "backtest start " + start_day.to_string() +
                                      " precedes earliest feasible start " + feasible.to_string());
    }
    if (end_day > data.last_day()) {
        throw InsufficientHistory(feasible, "backtest end " + end_day.to_string() + " after dataset end " +
                                                data.last_day().to_string());
    }

    BacktestResult result;
    std::optional<LearModelSet> models;
    for (Date d = start_day; d <= end_day; ++d) {
        if ((d - start_day) % config.recalib_every == 0) {
            models = calibrate(data, d, config.calibration, exec);
            ++result.calibrations;
            if (!models->all_converged()) {
                result.warnings.push_back("model " + models->id() + ": coordinate descent hit max_iter");
            }
            if (on_calibrated) on_calibrated(*models);
        }
        result.forecasts.push_back(predict(*models, data, d, PredictOptions{true}));
    }
    return result;
}

nlohmann::json snapshot_to_json(const LearModelSet& models) {
    using nlohmann::json;
    json hours = json::array();
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        const LassoFit& fit = models.fits[h];
        json coefs = json::object();
        for (std::size_t j = 0; j < fit.coefficients.size(); ++j) {
            if (fit.coefficients[j] != 0.0) coefs[models.layout->name(j).to_string()] = fit.coefficients[j];
        }
        hours.push_back({{"hour", h},
                         {"lambda", fit.lambda},
                         {"intercept", fit.intercept},
                         {"iterations", fit.iterations},
                         {"converged", fit.converged},
                         {"coefficients", std::move(coefs)}});
    }
    const ScalerParams& s = models.scaler;
    json feature_names = json::array();
    for (const auto& name : models.layout->names()) feature_names.push_back(name.to_string());
    return json{
        {"target_day", models.calibrated_for.to_string()},
        {"window",
         {{"first_day", models.window.first_day.to_string()},
          {"last_day", models.window.last_day.to_string()},
          {"length_days", models.window.length_days}}},
        {"feature_names", std::move(feature_names)},
        {"scaler",
         {{"method", scaling_method_name(s.method)},
          {"feature_location", s.feature_location},
          {"feature_scale", s.feature_scale},
          {"target_location", s.target_location},
          {"target_scale", s.target_scale}}},
        {"hours", std::move(hours)},
    };
}

LearModelSet snapshot_from_json(const nlohmann::json& j, const FeatureLayout& layout) {
    LearModelSet models;
    models.layout = &layout;
    models.calibrated_for = Date::parse(j.at("target_day").get<std::string>());
    const auto& w = j.at("window");
    models.window = {Date::parse(w.at("first_day").get<std::string>()),
                     Date::parse(w.at("last_day").get<std::string>()), w.at("length_days").get<int>()};

    const auto& s = j.at("scaler");
    ScalerParams& scaler = models.scaler;
    scaler.method = scaling_method_from_name(s.at("method").get<std::string>());
    scaler.feature_location = s.at("feature_location").get<std::vector<double>>();
    scaler.feature_scale = s.at("feature_scale").get<std::vector<double>>();
    scaler.target_location = s.at("target_location").get<std::array<double, kHoursPerDay>>();
    scaler.target_scale = s.at("target_scale").get<std::array<double, kHoursPerDay>>();
    if (scaler.feature_location.size() != layout.size()) {
        throw LengthMismatch(layout.size(), scaler.feature_location.size());
    }
    if (scaler.feature_scale.size() != layout.size()) throw LengthMismatch(layout.size(), scaler.feature_scale.size());
    scaler.passthrough.resize(layout.size());
    for (std::size_t k = 0; k < layout.size(); ++k) scaler.passthrough[k] = layout.is_dummy(k);

    const auto& hours = j.at("hours");
    if (hours.size() != kHoursPerDay) throw LengthMismatch(kHoursPerDay, hours.size());
    for (const auto& entry : hours) {
        const auto h = entry.at("hour").get<std::size_t>();
        if (h >= kHoursPerDay) throw std::invalid_argument("snapshot hour out of range");
        LassoFit& fit = models.fits[h];
        fit.lambda = entry.at("lambda").get<double>();
        fit.intercept = entry.at("intercept").get<double>();
        fit.iterations = entry.value("iterations", std::size_t{0});
        fit.converged = entry.value("converged", true);
        fit.coefficients.assign(layout.size(), 0.0);
        for (const auto& [name, value] : entry.at("coefficients").items()) {
            const auto idx = layout.find(name);
            if (!idx) throw std::invalid_argument("snapshot names unknown feature '" + name + "'");
            fit.coefficients[*idx] = value.get<double>();
        }
    }
    return models;
}

}  // namespace lear
