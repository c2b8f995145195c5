#include "lear/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lear/errors.hpp"

namespace lear {

namespace {

double median_of(std::vector<double>& v) {
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

struct Moments {
    double mean;
    double sd;
};

Moments population_moments(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

}  // namespace

std::string_view scaling_method_name(ScalingMethod m) {
    return m == ScalingMethod::ZScore ? "zscore" : "asinh";
}

ScalingMethod scaling_method_from_name(std::string_view name) {
    if (name == "zscore") return ScalingMethod::ZScore;
    if (name == "asinh") return ScalingMethod::MedianMadAsinh;
    throw std::invalid_argument("unknown scaling method '" + std::string(name) + "'");
}

LocationScale fit_column(std::span<const double> column, ScalingMethod method) {
    std::vector<double> finite;
    finite.reserve(column.size());
    for (double x : column) {
        if (std::isfinite(x)) finite.push_back(x);
    }
    if (finite.empty()) throw DegenerateMatrix("column has no finite entries");

    const auto [lo, hi] = std::minmax_element(finite.begin(), finite.end());
    if (*lo == *hi) return {*lo, 1.0};

    if (method == ScalingMethod::ZScore) {
        const Moments m = population_moments(finite);
        return {m.mean, m.sd > 0.0 ? m.sd : 1.0};
    }
    std::vector<double> work = finite;
    const double med = median_of(work);
    for (std::size_t i = 0; i < finite.size(); ++i) work[i] = std::abs(finite[i] - med);
    double mad = median_of(work);
    if (!(mad > 0.0)) {
        // More than half the column sits on the median (e.g. solar at night).
        mad = population_moments(finite).sd;
    }
    return {med, mad > 0.0 ? mad : 1.0};
}

ScalerParams fit_scaler(const DesignMatrix& matrix, ScalingMethod method) {
    if (matrix.num_rows() < 2) throw DegenerateMatrix("scaler needs at least two rows");
    const std::size_t p = matrix.rows.cols();
    ScalerParams params;
    params.method = method;
    params.feature_location.resize(p);
    params.feature_scale.resize(p);
    params.passthrough.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const bool dummy = matrix.layout != nullptr && matrix.layout->is_dummy(j);
        params.passthrough[j] = dummy;
        if (dummy) {
            params.feature_location[j] = 0.0;
            params.feature_scale[j] = 1.0;
            continue;
        }
        try {
            const LocationScale ls = fit_column(matrix.rows.col(j), method);
            params.feature_location[j] = ls.location;
            params.feature_scale[j] = ls.scale;
        } catch (const DegenerateMatrix&) {
            throw DegenerateMatrix("feature column " + std::to_string(j) + " has no finite entries");
        }
    }
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        const LocationScale ls = fit_column(matrix.targets[h], method);
        params.target_location[h] = ls.location;
        params.target_scale[h] = ls.scale;
    }
    return params;
}

double forward(ScalingMethod method, double x, double location, double scale) {
    const double z = (x - location) / scale;
    return method == ScalingMethod::ZScore ? z : std::asinh(z);
}

double inverse(ScalingMethod method, double z, double location, double scale) {
    const double u = method == ScalingMethod::ZScore ? z : std::sinh(z);
    return location + scale * u;
}

void transform_in_place(const ScalerParams& params, std::span<double> features) {
    if (features.size() != params.num_features()) throw LengthMismatch(params.num_features(), features.size());
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (params.passthrough[j]) continue;
        features[j] = forward(params.method, features[j], params.feature_location[j], params.feature_scale[j]);
    }
}

std::vector<double> transform(const ScalerParams& params, std::span<const double> features) {
    std::vector<double> out(features.begin(), features.end());
    transform_in_place(params, out);
    return out;
}

double transform_target(const ScalerParams& params, std::size_t hour, double price) {
    return forward(params.method, price, params.target_location.at(hour), params.target_scale.at(hour));
}

double inverse_transform_target(const ScalerParams& params, std::size_t hour, double value) {
    return inverse(params.method, value, params.target_location.at(hour), params.target_scale.at(hour));
}

}  // namespace lear
