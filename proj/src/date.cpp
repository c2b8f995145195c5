#include "lear/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace lear {

namespace {

using namespace std::chrono;

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

bool is_last_sunday(Date d, unsigned month) {
    return d.month() == month && d.weekday() == 6 && (d + 7).month() != month;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    serial_ = static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count());
}

Date Date::parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("expected YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    const int y = parse_int(text.substr(0, 4));
    const int m = parse_int(text.substr(5, 2));
    const int d = parse_int(text.substr(8, 2));
    if (m < 1 || d < 1) {
        throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
    }
    try {
        return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
    }
}

year_month_day Date::ymd() const { return year_month_day{sys_days{days{serial_}}}; }

int Date::year() const { return static_cast<int>(ymd().year()); }
unsigned Date::month() const { return static_cast<unsigned>(ymd().month()); }
unsigned Date::day() const { return static_cast<unsigned>(ymd().day()); }

int Date::weekday() const {
    // iso_encoding: Monday = 1 ... Sunday = 7
    return static_cast<int>(std::chrono::weekday{sys_days{days{serial_}}}.iso_encoding()) - 1;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

bool is_spring_forward(Date d) { return is_last_sunday(d, 3); }
bool is_fall_back(Date d) { return is_last_sunday(d, 10); }

}  // namespace lear
