#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lear/errors.hpp"
#include "lear/reporting.hpp"
#include "synthetic.hpp"

using namespace lear;
namespace fs = std::filesystem;

TEST_CASE("forecasts csv round trip") {
    ForecastDay f;
    f.target_day = Date(2016, 2, 29);
    for (std::size_t h = 0; h < 24; ++h) f.predicted[h] = 0.1 * static_cast<double>(h) + 1.0 / 3.0;
    std::array<double, 24> actual{};
    for (std::size_t h = 0; h < 24; ++h) actual[h] = -2.5 + static_cast<double>(h);
    f.actual = actual;

    std::ostringstream out;
    report::write_forecasts_csv(out, {f});
    const std::string text = out.str();
    CHECK(text.rfind("day,hour,actual,predicted\n2016-02-29,0,-2.5,", 0) == 0);

    std::istringstream in(text);
    const auto records = report::read_forecasts_csv(in);
    REQUIRE(records.size() == 24);
    CHECK(records == error_records({f}));
}

TEST_CASE("forecasts csv rejects malformed input") {
    std::istringstream bad_header("day,hour,value\n");
    CHECK_THROWS_AS(report::read_forecasts_csv(bad_header), MalformedRow);
    std::istringstream bad_hour("day,hour,actual,predicted\n2016-01-01,24,1,1\n");
    CHECK_THROWS_AS(report::read_forecasts_csv(bad_hour), MalformedRow);
    std::istringstream bad_value("day,hour,actual,predicted\n2016-01-01,2,x,1\n");
    CHECK_THROWS_AS(report::read_forecasts_csv(bad_value), MalformedRow);
    std::istringstream empty("day,hour,actual,predicted\n");
    CHECK(report::read_forecasts_csv(empty).empty());
}

TEST_CASE("attribution and family csv layout") {
    AttributionReport r;
    r.target_day = Date(2017, 5, 4);
    r.hour = 7;
    const auto j = *FeatureLayout::standard().find("WindForecastBE.lag0.h7");
    r.contributions = {{j, FeatureLayout::standard().name(j), 0.5, 2.0, 1.0}};
    r.intercept = 0.25;
    r.normalized_prediction = 1.25;
    r.price_prediction = 48.0;
    r.family_totals = group_by_family(r);

    std::ostringstream a;
    report::write_attribution_csv(a, {r});
    CHECK(a.str() ==
          "day,hour,feature,coefficient,normalized_value,product\n"
          "2017-05-04,7,WindForecastBE.lag0.h7,0.5,2,1\n");

    std::ostringstream f;
    report::write_family_csv(f, {r});
    const std::string fam = f.str();
    CHECK(fam.rfind("day,hour,family,total\n", 0) == 0);
    CHECK(fam.find("2017-05-04,7,WindForecastBE,1\n") != std::string::npos);
    CHECK(fam.find("2017-05-04,7,intercept,0.25\n") != std::string::npos);
    CHECK(fam.find("2017-05-04,7,normalized_prediction,1.25\n") != std::string::npos);
    CHECK(fam.find("2017-05-04,7,price_prediction,48\n") != std::string::npos);
}

TEST_CASE("error scatter outputs") {
    const std::vector<std::pair<double, double>> pts = {{100.0, 10.0}, {-5.0, -2.5}};
    std::ostringstream csv;
    report::write_error_vs_price_csv(csv, pts);
    CHECK(csv.str() == "actual,error\n100,10\n-5,-2.5\n");
    const std::string svg = report::render_error_scatter_svg(pts);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK_NOTHROW(report::render_error_scatter_svg({}));
}

TEST_CASE("json summaries") {
    const std::vector<ErrorRecord> r = {ErrorRecord::make(Date(2020, 1, 1), 0, 11.0, 10.0)};
    const auto m = report::metrics_to_json(compute_metrics(r));
    CHECK(m.at("mae") == 1.0);
    CHECK(m.at("count") == 1);
}

TEST_CASE("atomic write and hashing") {
    const fs::path dir = fs::temp_directory_path() / "lear_reporting_test";
    fs::remove_all(dir);
    const fs::path target = dir / "nested" / "file.txt";
    report::atomic_write(target, "first");
    report::atomic_write(target, "second");
    std::ifstream in(target);
    std::string content;
    std::getline(in, content);
    CHECK(content == "second");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
    fs::remove_all(dir);

    CHECK(report::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(report::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
