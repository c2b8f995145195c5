// lear: ingest market data, run rolling LEAR backtests, explain forecasts and
// report error diagnostics.
//
// Exit codes: 0 success, 1 I/O, 2 validation/coverage, 3 invariant violation.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lear/attribution.hpp"
#include "lear/diagnostics.hpp"
#include "lear/errors.hpp"
#include "lear/lear_engine.hpp"
#include "lear/market_data.hpp"
#include "lear/reporting.hpp"
#include "lear/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kIo = 1, kValidation = 2, kInvariant = 3 };

struct CliFailure {
    int code;
    std::string message;
};

struct RunConfig {
    std::string data;
    std::string from;
    std::string to;
    int window_days = 365;
    int recalib_every = 1;
    std::string scaling = "asinh";
    std::string criterion = "bic";
    double spike_sigma = 3.0;
    int spike_window_days = 30;
    std::optional<double> low_quantile;
    std::string out = "lear_out";
    std::uint64_t seed = 0;
    bool lenient = false;
    bool verify = false;

    // command specific
    bool wide = false;
    bool snapshots = false;
    std::string day;
    std::optional<int> hour;
    std::string snapshot;
    bool dense = false;
    std::string forecasts;
    bool no_svg = false;

    json to_json() const {
        return {{"data", data},
                {"from", from},
                {"to", to},
                {"window_days", window_days},
                {"recalib_every", recalib_every},
                {"scaling", scaling},
                {"criterion", criterion},
                {"spike_sigma", spike_sigma},
                {"spike_window_days", spike_window_days},
                {"low_quantile", low_quantile ? json(*low_quantile) : json(nullptr)},
                {"seed", seed},
                {"lenient", lenient}};
    }

    lear::CalibrationConfig calibration() const {
        lear::CalibrationConfig c;
        c.window_days = window_days;
        c.scaling = lear::scaling_method_from_name(scaling);
        c.criterion = lear::criterion_from_name(criterion);
        return c;
    }

    lear::ExtremeThresholds thresholds() const {
        return {spike_window_days, spike_sigma, low_quantile};
    }
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliFailure{kIo, "cannot read " + path.string()};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Output files of one command plus the manifest that ties them to config and data.
class OutputSet {
public:
    OutputSet(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}

    void write(const std::string& relative, const std::string& content) {
        try {
            lear::report::atomic_write(dir_ / relative, content);
        } catch (const std::exception& e) {
            throw CliFailure{kIo, e.what()};
        }
        files_[relative] = lear::report::sha256_hex(content);
    }

    void write_manifest(const RunConfig& cfg, const std::string& dataset_hash) {
        const json config = cfg.to_json();
        const json manifest = {{"command", command_},
                               {"config", config},
                               {"config_hash", lear::report::sha256_hex(config.dump())},
                               {"dataset_hash", dataset_hash},
                               {"files", files_}};
        lear::report::atomic_write(dir_ / ("manifest." + command_ + ".json"), manifest.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::string command_;
    json files_ = json::object();
};

struct LoadedData {
    lear::MarketDataset dataset;
    std::string hash;
    lear::ParseResult parse;
};

lear::ParseResult parse_file(const std::string& content, bool lenient, bool force_wide) {
    std::istringstream in(content);
    std::string header;
    std::getline(in, header);
    lear::CsvSchema schema = force_wide ? lear::CsvSchema::wide_format() : lear::detect_schema(header);
    in.clear();
    in.seekg(0);
    return lear::parse_csv(in, schema, lear::ParseOptions{lenient});
}

LoadedData load_dataset(const RunConfig& cfg) {
    if (cfg.data.empty()) throw CliFailure{kIo, "--data is required"};
    const std::string content = read_file(cfg.data);
    lear::ParseResult parsed = parse_file(content, cfg.lenient, cfg.wide);
    for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
    lear::MarketDataset dataset = lear::impute_missing_days(parsed.grid);
    return {std::move(dataset), lear::report::sha256_hex(content), std::move(parsed)};
}

lear::Date parse_date_flag(const std::string& value, const char* flag) {
    try {
        return lear::Date::parse(value);
    } catch (const std::invalid_argument& e) {
        throw CliFailure{kValidation, std::string(flag) + ": " + e.what()};
    }
}

void check_window(const RunConfig& cfg) {
    if (cfg.window_days < 30) throw CliFailure{kValidation, "--window-days must be >= 30"};
    if (cfg.recalib_every < 1) throw CliFailure{kValidation, "--recalib-every must be >= 1"};
}

void check_coverage(const lear::MarketDataset& data, const RunConfig& cfg, lear::Date from, lear::Date to) {
    const lear::Date feasible = lear::earliest_feasible_start(data, cfg.window_days);
    if (from < feasible) {
        throw CliFailure{kValidation, "InsufficientHistory: " + from.to_string() +
                                          " precedes the earliest feasible start " + feasible.to_string() +
                                          " (dataset starts " + data.first_day().to_string() + ", window " +
                                          std::to_string(cfg.window_days) + " days + 7-day lag margin)"};
    }
    if (to > data.last_day()) {
        throw CliFailure{kValidation, "InsufficientHistory: " + to.to_string() + " is after the dataset end " +
                                          data.last_day().to_string()};
    }
    if (to < from) throw CliFailure{kValidation, "--to precedes --from"};
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const RunConfig& cfg) {
    if (cfg.data.empty()) throw CliFailure{kIo, "--data is required"};
    const std::string content = read_file(cfg.data);
    lear::ParseResult parsed = parse_file(content, cfg.lenient, cfg.wide);
    const lear::ValidationReport raw_report = lear::validate(parsed.grid);

    OutputSet out(cfg.out, "ingest");
    try {
        const lear::MarketDataset dataset = lear::impute_missing_days(parsed.grid);
        const lear::ValidationReport final_report = lear::validate(dataset.grid());
        std::ostringstream csv;
        lear::write_csv(csv, dataset.grid());
        out.write("dataset.csv", csv.str());
        json report = lear::report::validation_to_json(final_report, dataset.imputation_log(), parsed.warnings,
                                                       parsed.dst_adjustments);
        report["raw"] = lear::report::validation_to_json(raw_report, {}, {}, {});
        report["first_day"] = dataset.first_day().to_string();
        report["last_day"] = dataset.last_day().to_string();
        out.write("validation.json", report.dump(2) + "\n");
        out.write_manifest(cfg, lear::report::sha256_hex(content));
        std::cout << "ingested " << dataset.num_days() << " days (" << dataset.first_day().to_string() << " .. "
                  << dataset.last_day().to_string() << "), imputed " << dataset.imputation_log().size()
                  << " series-days\n";
        return kOk;
    } catch (const lear::BoundaryGap& e) {
        json report = lear::report::validation_to_json(raw_report, {}, parsed.warnings, parsed.dst_adjustments);
        report["error"] = e.what();
        out.write("validation.json", report.dump(2) + "\n");
        throw CliFailure{kValidation, e.what()};
    } catch (const lear::EmptySeries& e) {
        json report = lear::report::validation_to_json(raw_report, {}, parsed.warnings, parsed.dst_adjustments);
        report["error"] = e.what();
        out.write("validation.json", report.dump(2) + "\n");
        throw CliFailure{kValidation, e.what()};
    }
}

// ---------------------------------------------------------------- backtest

int cmd_backtest(const RunConfig& cfg) {
    check_window(cfg);
    const LoadedData loaded = load_dataset(cfg);
    const lear::MarketDataset& data = loaded.dataset;
    const lear::Date feasible = lear::earliest_feasible_start(data, cfg.window_days);
    const lear::Date from = cfg.from.empty() ? feasible : parse_date_flag(cfg.from, "--from");
    const lear::Date to = cfg.to.empty() ? data.last_day() : parse_date_flag(cfg.to, "--to");
    check_coverage(data, cfg, from, to);

    OutputSet out(cfg.out, "backtest");
    lear::BacktestConfig bt{cfg.calibration(), cfg.recalib_every};
    lear::SnapshotSink sink;
    if (cfg.snapshots) {
        sink = [&](const lear::LearModelSet& models) {
            out.write("snapshots/" + models.calibrated_for.to_string() + ".json",
                      lear::snapshot_to_json(models).dump(1) + "\n");
        };
    }
    const lear::BacktestResult result = lear::rolling_backtest(data, from, to, bt, sink);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

    std::ostringstream csv;
    lear::report::write_forecasts_csv(csv, result.forecasts);
    out.write("forecasts.csv", csv.str());

    const auto records = lear::error_records(result.forecasts);
    json metrics = {{"overall", lear::report::metrics_to_json(lear::compute_metrics(records))},
                    {"from", from.to_string()},
                    {"to", to.to_string()},
                    {"forecast_days", result.forecasts.size()},
                    {"calibrations", result.calibrations},
                    {"warnings", result.warnings}};
    out.write("metrics.json", metrics.dump(2) + "\n");
    out.write_manifest(cfg, loaded.hash);
    std::cout << "backtest " << from.to_string() << " .. " << to.to_string() << ": " << result.forecasts.size()
              << " days, " << result.calibrations << " calibrations, MAE "
              << metrics["overall"]["mae"].get<double>() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- explain

std::string two_digits(int h) { return (h < 10 ? "0" : "") + std::to_string(h); }

int cmd_explain(const RunConfig& cfg) {
    check_window(cfg);
    const LoadedData loaded = load_dataset(cfg);
    const lear::MarketDataset& data = loaded.dataset;
    if (cfg.day.empty()) throw CliFailure{kValidation, "--day is required"};
    const lear::Date day = parse_date_flag(cfg.day, "--day");
    if (cfg.hour && (*cfg.hour < 0 || *cfg.hour > 23)) throw CliFailure{kValidation, "--hour must lie in 0..23"};

    std::optional<lear::LearModelSet> models;
    bool stale_ok = false;
    fs::path snapshot_path = cfg.snapshot;
    if (snapshot_path.empty()) {
        const fs::path candidate = fs::path(cfg.out) / "snapshots" / (day.to_string() + ".json");
        if (fs::exists(candidate)) snapshot_path = candidate;
    }
    if (!snapshot_path.empty()) {
        models = lear::snapshot_from_json(json::parse(read_file(snapshot_path)));
        stale_ok = true;
        if (models->calibrated_for > day) {
            throw CliFailure{kValidation, "snapshot calibrated for " + models->calibrated_for.to_string() +
                                              " cannot explain the earlier day " + day.to_string()};
        }
        if (!data.contains(day) || day - 7 < data.first_day()) {
            throw CliFailure{kValidation, day.to_string() + " is outside the dataset coverage"};
        }
    } else {
        check_coverage(data, cfg, day, day);
        models = lear::calibrate(data, day, cfg.calibration());
    }

    std::vector<int> hours;
    if (cfg.hour) {
        hours.push_back(*cfg.hour);
    } else {
        for (int h = 0; h < 24; ++h) hours.push_back(h);
    }

    std::vector<lear::AttributionReport> reports;
    for (int h : hours) {
        reports.push_back(lear::decompose(*models, data, day, static_cast<std::size_t>(h),
                                          lear::DecomposeOptions{cfg.dense, stale_ok}));
    }

    if (cfg.verify) {
        const lear::ForecastDay forecast = lear::predict(*models, data, day, lear::PredictOptions{stale_ok});
        for (const auto& r : reports) {
            const double additivity = r.contribution_sum() + r.intercept - r.normalized_prediction;
            const double vs_predict = r.normalized_prediction - forecast.normalized[r.hour];
            const double price_gap =
                lear::inverse_transform_target(models->scaler, r.hour, r.contribution_sum() + r.intercept) -
                forecast.predicted[r.hour];
            if (!(std::abs(additivity) <= 1e-9 && std::abs(vs_predict) <= 1e-9 && std::abs(price_gap) <= 1e-9)) {
                throw CliFailure{kInvariant, "additivity violated at hour " + std::to_string(r.hour) +
                                                 ": sum+b-normalized=" + std::to_string(additivity) +
                                                 ", price gap=" + std::to_string(price_gap)};
            }
        }
        std::cout << "verified additivity for " << reports.size() << " hour(s)\n";
    }

    OutputSet out(cfg.out, "explain");
    for (const auto& r : reports) {
        std::ostringstream csv;
        lear::report::write_attribution_csv(csv, {r});
        out.write("attribution_" + day.to_string() + "_h" + two_digits(static_cast<int>(r.hour)) + ".csv", csv.str());
    }
    std::ostringstream fam;
    lear::report::write_family_csv(fam, reports);
    out.write("families_" + day.to_string() + ".csv", fam.str());

    std::ostringstream rank;
    rank << "rank,family,mean_abs_total\n";
    const auto ranking = lear::rank_family_influences(reports);
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        rank << i + 1 << ',' << ranking[i].key.label() << ',' << lear::text::format_double(ranking[i].mean_abs_total)
             << '\n';
    }
    out.write("influence_" + day.to_string() + ".csv", rank.str());
    out.write_manifest(cfg, loaded.hash);
    std::cout << "explained " << reports.size() << " hour(s) of " << day.to_string() << " using model "
              << models->id() << " (" << lear::scaling_method_name(models->scaler.method) << " scaling)\n";
    return kOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const RunConfig& cfg) {
    const fs::path forecasts_path = cfg.forecasts.empty() ? fs::path(cfg.out) / "forecasts.csv" : fs::path(cfg.forecasts);
    if (!fs::exists(forecasts_path)) throw CliFailure{kIo, "missing " + forecasts_path.string()};
    std::vector<lear::ErrorRecord> records;
    {
        std::istringstream in(read_file(forecasts_path));
        try {
            records = lear::report::read_forecasts_csv(in);
        } catch (const lear::MalformedRow& e) {
            throw CliFailure{kIo, forecasts_path.string() + ": " + e.what()};
        }
    }
    if (records.empty()) throw CliFailure{kIo, forecasts_path.string() + " holds no forecasts"};

    const LoadedData loaded = load_dataset(cfg);
    const lear::ExtremeThresholds thresholds = cfg.thresholds();
    const auto labels = lear::label_records(loaded.dataset, records, thresholds);
    const lear::SegmentReport segments = lear::segment_report(records, labels);
    const auto points = lear::error_price_points(records);

    OutputSet out(cfg.out, "report");
    std::ostringstream csv;
    lear::report::write_error_vs_price_csv(csv, points);
    out.write("error_vs_price.csv", csv.str());
    json seg = lear::report::segments_to_json(segments, thresholds);
    seg["overall"] = lear::report::metrics_to_json(lear::compute_metrics(records));
    out.write("segments.json", seg.dump(2) + "\n");
    if (!cfg.no_svg) out.write("error_vs_price.svg", lear::report::render_error_scatter_svg(points));
    out.write_manifest(cfg, loaded.hash);

    for (const auto& s : segments.segments) {
        std::cout << lear::event_kind_name(s.kind) << ": " << s.count;
        if (s.metrics) std::cout << " hours, MAE " << s.metrics->mae << ", bias " << s.metrics->bias;
        std::cout << "\n";
    }
    return kOk;
}

void add_data_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--data", cfg.data, "Hourly market CSV (long or wide layout)");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_flag("--lenient", cfg.lenient, "Skip malformed rows with a warning");
    sub->add_flag("--wide", cfg.wide, "Force the wide CSV layout");
    sub->add_option("--seed", cfg.seed, "Recorded in the manifest; the pipeline itself is deterministic");
}

void add_model_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--window-days", cfg.window_days, "Calibration window length in days");
    sub->add_option("--scaling", cfg.scaling, "Normalization")->check(CLI::IsMember({"zscore", "asinh"}));
    sub->add_option("--criterion", cfg.criterion, "Penalty selection criterion")->check(CLI::IsMember({"aic", "bic"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LEAR day-ahead electricity price forecaster"};
    app.set_config("--config", "", "TOML-style config file; command-line flags take precedence");
    app.require_subcommand(1);
    RunConfig cfg;

    auto* ingest = app.add_subcommand("ingest", "Validate, impute and canonicalize an hourly dataset");
    add_data_options(ingest, cfg);

    auto* backtest = app.add_subcommand("backtest", "Rolling recalibration and day-ahead forecasts");
    add_data_options(backtest, cfg);
    add_model_options(backtest, cfg);
    backtest->add_option("--from", cfg.from, "First forecast day (YYYY-MM-DD)");
    backtest->add_option("--to", cfg.to, "Last forecast day (YYYY-MM-DD)");
    backtest->add_option("--recalib-every", cfg.recalib_every, "Recalibrate every N days");
    backtest->add_flag("--snapshots", cfg.snapshots, "Write a model snapshot JSON per calibration");

    auto* explain = app.add_subcommand("explain", "Per-feature attribution of one day's forecasts");
    add_data_options(explain, cfg);
    add_model_options(explain, cfg);
    explain->add_option("--day", cfg.day, "Forecast day (YYYY-MM-DD)");
    explain->add_option("--hour", cfg.hour, "Delivery hour 0..23 (default: all)");
    explain->add_option("--snapshot", cfg.snapshot, "Model snapshot JSON to explain instead of recalibrating");
    explain->add_flag("--verify", cfg.verify, "Check that contributions + intercept reproduce the prediction");
    explain->add_flag("--dense", cfg.dense, "Include zero coefficients");

    auto* report = app.add_subcommand("report", "Error-vs-price scatter and extreme-condition segments");
    add_data_options(report, cfg);
    report->add_option("--forecasts", cfg.forecasts, "forecasts.csv (default: <out>/forecasts.csv)");
    report->add_option("--spike-sigma", cfg.spike_sigma, "Spike threshold in rolling standard deviations");
    report->add_option("--spike-window-days", cfg.spike_window_days, "Trailing window for spike statistics");
    report->add_option("--low-quantile", cfg.low_quantile, "Add a low-price segment below this trailing quantile");
    report->add_flag("--no-svg", cfg.no_svg, "Skip error_vs_price.svg");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return cmd_ingest(cfg);
        if (*backtest) return cmd_backtest(cfg);
        if (*explain) return cmd_explain(cfg);
        if (*report) return cmd_report(cfg);
    } catch (const CliFailure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const lear::InsufficientHistory& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const lear::Error& e) {
        // Parse and imputation failures: the input does not validate.
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}
