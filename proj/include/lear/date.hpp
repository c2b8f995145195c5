#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lear {

/// Calendar day stored as a day count since 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t serial) : serial_(serial) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses `YYYY-MM-DD`. Throws std::invalid_argument on malformed or impossible dates.
    static Date parse(std::string_view text);

    constexpr std::int32_t serial() const { return serial_; }

    std::chrono::year_month_day ymd() const;
    int year() const;
    unsigned month() const;
    unsigned day() const;

    /// 0 = Monday ... 6 = Sunday.
    int weekday() const;

    std::string to_string() const;

    constexpr Date operator+(int days) const { return Date(serial_ + days); }
    constexpr Date operator-(int days) const { return Date(serial_ - days); }
    constexpr int operator-(Date other) const { return serial_ - other.serial_; }
    constexpr Date& operator++() {
        ++serial_;
        return *this;
    }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::int32_t serial_ = 0;
};

/// EU summer-time switch days: last Sunday of March (02:00 skipped) and of October (02:00 repeated).
bool is_spring_forward(Date d);
bool is_fall_back(Date d);

}  // namespace lear
