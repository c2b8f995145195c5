#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lear::text {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Strict decimal parse: the whole field must be consumed and the value finite.
std::optional<double> parse_double(std::string_view field);

/// Splits on ',' without quote handling (the market CSV formats never quote).
std::vector<std::string_view> split_fields(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace lear::text
