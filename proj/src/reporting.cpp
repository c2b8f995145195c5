#include "lear/reporting.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "lear/errors.hpp"
#include "lear/text.hpp"

namespace lear::report {

using text::format_double;

void write_forecasts_csv(std::ostream& out, const std::vector<ForecastDay>& forecasts) {
    out << "day,hour,actual,predicted\n";
    for (const auto& f : forecasts) {
        const std::string day = f.target_day.to_string();
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            out << day << ',' << h << ',' << (f.actual ? format_double((*f.actual)[h]) : std::string()) << ','
                << format_double(f.predicted[h]) << '\n';
        }
    }
}

std::vector<ErrorRecord> read_forecasts_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || text::trim(line) != "day,hour,actual,predicted") {
        throw MalformedRow(1, "expected header 'day,hour,actual,predicted'");
    }
    std::vector<ErrorRecord> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto f = text::split_fields(text::trim(line));
        if (f.size() != 4) throw MalformedRow(line_no, "expected 4 fields");
        Date day;
        try {
            day = Date::parse(text::trim(f[0]));
        } catch (const std::invalid_argument& e) {
            throw MalformedRow(line_no, e.what());
        }
        const auto hour = text::parse_double(f[1]);
        const auto actual = text::parse_double(f[2]);
        const auto predicted = text::parse_double(f[3]);
        if (!hour || *hour < 0 || *hour > 23 || *hour != std::floor(*hour)) {
            throw MalformedRow(line_no, "bad hour");
        }
        if (!actual || !predicted) throw MalformedRow(line_no, "missing actual or predicted value");
        out.push_back(ErrorRecord::make(day, static_cast<int>(*hour), *actual, *predicted));
    }
    return out;
}

void write_attribution_csv(std::ostream& out, const std::vector<AttributionReport>& reports) {
    out << "day,hour,feature,coefficient,normalized_value,product\n";
    for (const auto& r : reports) {
        const std::string day = r.target_day.to_string();
        for (const auto& c : r.contributions) {
            out << day << ',' << r.hour << ',' << c.feature.to_string() << ',' << format_double(c.coefficient) << ','
                << format_double(c.feature_value_normalized) << ',' << format_double(c.product) << '\n';
        }
    }
}

void write_family_csv(std::ostream& out, const std::vector<AttributionReport>& reports) {
    out << "day,hour,family,total\n";
    for (const auto& r : reports) {
        const std::string day = r.target_day.to_string();
        for (const auto& t : r.family_totals) {
            out << day << ',' << r.hour << ',' << t.key.label() << ',' << format_double(t.total) << '\n';
        }
        out << day << ',' << r.hour << ",intercept," << format_double(r.intercept) << '\n';
        out << day << ',' << r.hour << ",normalized_prediction," << format_double(r.normalized_prediction) << '\n';
        out << day << ',' << r.hour << ",price_prediction," << format_double(r.price_prediction) << '\n';
    }
}

void write_error_vs_price_csv(std::ostream& out, const std::vector<std::pair<double, double>>& points) {
    out << "actual,error\n";
    for (const auto& [x, y] : points) out << format_double(x) << ',' << format_double(y) << '\n';
}

std::string render_error_scatter_svg(const std::vector<std::pair<double, double>>& points) {
    constexpr double width = 640, height = 480, margin = 50;
    double xmin = 0, xmax = 1, ymin = -1, ymax = 1;
    if (!points.empty()) {
        xmin = xmax = points.front().first;
        ymin = ymax = points.front().second;
        for (const auto& [x, y] : points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        ymin = std::min(ymin, 0.0);
        ymax = std::max(ymax, 0.0);
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
    }
    auto sx = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto sy = [&](double y) { return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin); };
    char buf[160];
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"gray\"/>\n", margin,
                  sy(0.0), width - margin, sy(0.0));
    svg << buf;
    std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                  margin, margin, width - 2 * margin, height - 2 * margin);
    svg << buf;
    for (const auto& [x, y] : points) {
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.5\" fill=\"steelblue\" fill-opacity=\"0.5\"/>\n",
                      sx(x), sy(y));
        svg << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">actual price (EUR/MWh)</text>\n",
                  width / 2, height - 12);
    svg << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"14\" y=\"%.1f\" transform=\"rotate(-90 14 %.1f)\" text-anchor=\"middle\">error (actual - predicted)</text>\n",
                  height / 2, height / 2);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\">%.4g</text>\n", margin, height - margin + 14, xmin);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                  width - margin, height - margin + 14, xmax);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                  margin - 4, height - margin, ymin);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                  margin - 4, margin + 8, ymax);
    svg << buf;
    svg << "</svg>\n";
    return svg.str();
}

nlohmann::json metrics_to_json(const Metrics& m) {
    return {{"count", m.count},
            {"mae", m.mae},
            {"rmse", m.rmse},
            {"smape", m.smape ? nlohmann::json(*m.smape) : nlohmann::json(nullptr)},
            {"bias", m.bias}};
}

nlohmann::json segments_to_json(const SegmentReport& report, const ExtremeThresholds& thresholds) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : report.segments) {
        nlohmann::json entry = {{"label", event_kind_name(s.kind)}, {"count", s.count}, {"share", s.share}};
        if (s.metrics) {
            entry["mae"] = s.metrics->mae;
            entry["rmse"] = s.metrics->rmse;
            entry["bias"] = s.metrics->bias;
        } else {
            entry["mae"] = nullptr;
            entry["rmse"] = nullptr;
            entry["bias"] = nullptr;
        }
        segs.push_back(std::move(entry));
    }
    auto opt = [](const std::optional<bool>& b) { return b ? nlohmann::json(*b) : nlohmann::json(nullptr); };
    return {{"total", report.total},
            {"thresholds",
             {{"window_days", thresholds.window_days},
              {"spike_sigma", thresholds.spike_sigma},
              {"low_quantile", thresholds.low_quantile ? nlohmann::json(*thresholds.low_quantile)
                                                       : nlohmann::json(nullptr)}}},
            {"segments", std::move(segs)},
            {"summary",
             {{"spike_mae_exceeds_normal", opt(report.spike_worse_than_normal)},
              {"negative_mae_exceeds_normal", opt(report.negative_worse_than_normal)}}}};
}

nlohmann::json validation_to_json(const ValidationReport& report, const std::vector<ImputationEntry>& log,
                                  const std::vector<std::string>& warnings,
                                  const std::vector<std::string>& dst_adjustments) {
    nlohmann::json gaps = nlohmann::json::array();
    for (Date d : report.contiguity_violations) gaps.push_back(d.to_string());
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : report.non_finite) {
        cells.push_back({{"day", c.day.to_string()}, {"hour", c.hour}, {"series", series_name(c.series)}});
    }
    nlohmann::json coverage = nlohmann::json::object();
    for (SeriesId s : kAllSeries) coverage[std::string(series_name(s))] = report.coverage_percent[index_of(s)];
    nlohmann::json imputed = nlohmann::json::array();
    for (const auto& e : log) imputed.push_back({{"day", e.day.to_string()}, {"series", series_name(e.series)}});
    return {{"ok", report.ok()},
            {"contiguity_violations", std::move(gaps)},
            {"non_finite", std::move(cells)},
            {"coverage_percent", std::move(coverage)},
            {"imputation_log", std::move(imputed)},
            {"dst_adjustments", dst_adjustments},
            {"warnings", warnings}};
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

}  // namespace lear::report
