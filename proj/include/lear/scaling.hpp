#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "lear/features.hpp"
#include "lear/series.hpp"

namespace lear {

enum class ScalingMethod {
    ZScore,          // (x - mean) / sd
    MedianMadAsinh,  // asinh((x - median) / MAD)
};

std::string_view scaling_method_name(ScalingMethod m);
ScalingMethod scaling_method_from_name(std::string_view name);

/// Location/scale per feature and per delivery-hour target, fitted on one calibration window.
/// Dummy columns are stored with location 0, scale 1 and are passed through untouched.
struct ScalerParams {
    ScalingMethod method = ScalingMethod::MedianMadAsinh;
    std::vector<double> feature_location;
    std::vector<double> feature_scale;
    std::vector<bool> passthrough;
    std::array<double, kHoursPerDay> target_location{};
    std::array<double, kHoursPerDay> target_scale{};

    std::size_t num_features() const { return feature_location.size(); }

    bool operator==(const ScalerParams&) const = default;
};

struct LocationScale {
    double location;
    double scale;
};

/// Location and scale of one column over its finite entries. Non-positive scale is coerced to 1.
/// When the MAD is zero but the column is not constant the population standard deviation is used.
LocationScale fit_column(std::span<const double> column, ScalingMethod method);

/// Requires at least two rows. Throws DegenerateMatrix when a column has no finite entry.
ScalerParams fit_scaler(const DesignMatrix& matrix, ScalingMethod method);

double forward(ScalingMethod method, double x, double location, double scale);
double inverse(ScalingMethod method, double z, double location, double scale);

/// Throws LengthMismatch.
std::vector<double> transform(const ScalerParams& params, std::span<const double> features);
void transform_in_place(const ScalerParams& params, std::span<double> features);

double transform_target(const ScalerParams& params, std::size_t hour, double price);
double inverse_transform_target(const ScalerParams& params, std::size_t hour, double value);

}  // namespace lear
