#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

#include "lear/attribution.hpp"
#include "lear/errors.hpp"
#include "synthetic.hpp"

using namespace lear;

namespace {

// Identity scaler: normalized values equal raw values.
LearModelSet identity_model(Date day) {
    const FeatureLayout& layout = FeatureLayout::standard();
    LearModelSet m;
    m.calibrated_for = day;
    m.window = {day - 30, day - 1, 30};
    m.scaler.method = ScalingMethod::ZScore;
    m.scaler.feature_location.assign(layout.size(), 0.0);
    m.scaler.feature_scale.assign(layout.size(), 1.0);
    m.scaler.passthrough.resize(layout.size());
    for (std::size_t j = 0; j < layout.size(); ++j) m.scaler.passthrough[j] = layout.is_dummy(j);
    m.scaler.target_location.fill(0.0);
    m.scaler.target_scale.fill(1.0);
    for (auto& f : m.fits) {
        f.coefficients.assign(layout.size(), 0.0);
        f.converged = true;
    }
    return m;
}

Contribution contribution(const std::string& name, double product) {
    const auto idx = FeatureLayout::standard().find(name);
    REQUIRE(idx);
    return {*idx, FeatureLayout::standard().name(*idx), product, 1.0, product};
}

// Family label from the serialized feature name alone.
std::string label_of(const std::string& feature) { return feature.substr(0, feature.find('.')); }

}  // namespace

TEST_CASE("intercept-only model") {
    const MarketDataset ds = testing::make_constant(Date(2015, 1, 1), 20, 3.0);
    LearModelSet m = identity_model(Date(2015, 1, 15));
    m.fits[4].intercept = 2.5;
    const auto r = decompose(m, ds, Date(2015, 1, 15), 4);
    CHECK(r.contributions.empty());
    CHECK(r.normalized_prediction == 2.5);
    CHECK(r.intercept == 2.5);
    for (const auto& t : r.family_totals) CHECK(t.total == 0.0);
}

TEST_CASE("single coefficient arithmetic") {
    const MarketDataset ds = testing::make_constant(Date(2015, 1, 1), 20, 3.0);
    LearModelSet m = identity_model(Date(2015, 1, 15));
    const auto j = *FeatureLayout::standard().find("price.lag1.h0");
    m.fits[0].coefficients[j] = 2.0;
    m.fits[0].intercept = 1.0;
    const auto r = decompose(m, ds, Date(2015, 1, 15), 0);
    REQUIRE(r.contributions.size() == 1);
    CHECK(r.contributions[0].feature.to_string() == "price.lag1.h0");
    CHECK(r.contributions[0].feature_value_normalized == 3.0);
    CHECK(r.contributions[0].product == 6.0);
    CHECK(r.normalized_prediction == 7.0);
    CHECK(r.price_prediction == 7.0);

    const auto dense = decompose(m, ds, Date(2015, 1, 15), 0, DecomposeOptions{true, false});
    CHECK(dense.contributions.size() == 463);
    CHECK(dense.contribution_sum() == 6.0);

    CHECK_THROWS_AS(decompose(m, ds, Date(2015, 1, 16), 0), ModelDateMismatch);
    CHECK_NOTHROW(decompose(m, ds, Date(2015, 1, 16), 0, DecomposeOptions{false, true}));
    CHECK_THROWS_AS(decompose(m, ds, Date(2015, 1, 15), 24), std::invalid_argument);
}

TEST_CASE("decomposition reproduces predict on a calibrated day") {
    testing::SyntheticSpec spec;
    spec.num_days = 120;
    spec.seed = 8;
    const MarketDataset ds = testing::make_synthetic(spec);
    for (auto method : {ScalingMethod::ZScore, ScalingMethod::MedianMadAsinh}) {
        CalibrationConfig c;
        c.window_days = 90;
        c.scaling = method;
        const Date d = ds.first_day() + 100;
        const LearModelSet m = calibrate(ds, d, c);
        const ForecastDay f = predict(m, ds, d);
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
            const auto r = decompose(m, ds, d, h);
            CHECK(std::abs(r.contribution_sum() + r.intercept - f.normalized[h]) <= 1e-9);
            CHECK(std::abs(inverse_transform_target(m.scaler, h, r.contribution_sum() + r.intercept) -
                           f.predicted[h]) <= 1e-9);
            CHECK(r.contributions.size() == m.fits[h].nonzero_count());
        }
    }
}

TEST_CASE("family totals") {
    AttributionReport r;
    SUBCASE("one family holds everything") {
        r.contributions = {contribution("LoadForecastFR.lag0.h3", 1.5), contribution("LoadForecastFR.lag7.h9", -0.25)};
        const auto totals = group_by_family(r);
        REQUIRE(totals.size() == 7);
        for (const auto& t : totals) {
            if (t.key.label() == "LoadForecastFR") {
                CHECK(t.total == r.contribution_sum());
            } else {
                CHECK(t.total == 0.0);
            }
        }
    }
    SUBCASE("empty report") {
        for (const auto& t : group_by_family(r)) CHECK(t.total == 0.0);
    }
    SUBCASE("canonical family order") {
        std::vector<std::string> labels;
        for (const auto& k : family_keys(FeatureLayout::standard())) labels.push_back(k.label());
        CHECK(labels == std::vector<std::string>{"price", "GenForecastFR", "LoadForecastFR", "WindForecastBE",
                                                 "SolarForecastBE", "LoadForecastBE", "dow"});
    }
}

TEST_CASE("family totals on a calibrated day match a regrouping by name") {
    testing::SyntheticSpec spec;
    spec.num_days = 120;
    spec.seed = 19;
    spec.drivers = {{SeriesId::WindForecastBE, 1.5}, {SeriesId::LoadForecastFR, -0.8}, {SeriesId::SolarForecastBE, 0.4}};
    const MarketDataset ds = testing::make_synthetic(spec);
    CalibrationConfig c;
    c.window_days = 90;
    const Date d = ds.first_day() + 110;
    const LearModelSet m = calibrate(ds, d, c);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        const auto r = decompose(m, ds, d, h);
        std::map<std::string, double> oracle;
        for (const auto& cb : r.contributions) oracle[label_of(cb.feature.to_string())] += cb.product;
        for (const auto& t : r.family_totals) CHECK(t.total == doctest::Approx(oracle[t.key.label()]).epsilon(1e-12));
    }
}

TEST_CASE("influence ranking") {
    SUBCASE("single report ranks by absolute product") {
        AttributionReport r;
        r.contributions = {contribution("price.lag1.h0", 0.5), contribution("WindForecastBE.lag0.h2", -2.0),
                           contribution("dow.3", 1.0)};
        const auto ranked = rank_influences({r});
        CHECK(ranked.size() == 463);
        CHECK(ranked[0].name == "WindForecastBE.lag0.h2");
        CHECK(ranked[1].name == "dow.3");
        CHECK(ranked[2].name == "price.lag1.h0");
        CHECK(ranked[0].mean_abs_product == 2.0);
    }
    SUBCASE("ties keep canonical order") {
        AttributionReport a, b;
        a.contributions = {contribution("SolarForecastBE.lag1.h4", 1.0)};
        b.contributions = {contribution("GenForecastFR.lag0.h7", -1.0)};
        const auto ranked = rank_influences({a, b});
        CHECK(ranked[0].name == "GenForecastFR.lag0.h7");
        CHECK(ranked[1].name == "SolarForecastBE.lag1.h4");
        CHECK(ranked[0].mean_abs_product == 0.5);
        // Zero entries also keep canonical order.
        CHECK(ranked[2].name == "price.lag1.h0");
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS(rank_influences({}), EmptyInput);
        CHECK_THROWS_AS(rank_family_influences({}), EmptyInput);
    }
}

TEST_CASE("a dominant driver ranks first") {
    int first = 0, family_first = 0;
    const int runs = 100;
    for (int seed = 0; seed < runs; ++seed) {
        testing::SyntheticSpec spec;
        spec.num_days = 75;
        spec.seed = static_cast<std::uint64_t>(seed) + 500;
        spec.drivers = {{SeriesId::WindForecastBE, 3.0}, {SeriesId::LoadForecastFR, -0.3}};
        const MarketDataset ds = testing::make_synthetic(spec);
        CalibrationConfig c;
        c.window_days = 60;
        const Date d = ds.first_day() + 70;
        const LearModelSet m = calibrate(ds, d, c);
        std::vector<AttributionReport> reports;
        for (std::size_t h = 0; h < kHoursPerDay; ++h) reports.push_back(decompose(m, ds, d, h));
        if (rank_influences(reports)[0].name.rfind("WindForecastBE.lag0.", 0) == 0) ++first;
        if (rank_family_influences(reports)[0].key.label() == "WindForecastBE") ++family_first;
    }
    MESSAGE("driver ranked first: feature " << first << "/" << runs << ", family " << family_first << "/" << runs);
    CHECK(first >= 95);
    CHECK(family_first >= 95);
}
