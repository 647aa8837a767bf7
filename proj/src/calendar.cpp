#include "pricecast/calendar.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::sys_days;
using std::chrono::year_month_day;

year_month_day civil_date(std::int64_t hours_since_epoch) {
    const auto day_count = hours_since_epoch >= 0 ? hours_since_epoch / 24 : (hours_since_epoch - 23) / 24;
    return year_month_day{sys_days{days{day_count}}};
}

unsigned parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
    unsigned value = 0;
    const char* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + count, value);
    if (ec != std::errc{} || ptr != first + count) {
        throw ArgumentError("malformed timestamp '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

Timestamp Timestamp::from_civil(int year, unsigned month, unsigned day, unsigned hour) {
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok() || hour > 23) {
        throw ArgumentError("invalid calendar date/hour");
    }
    const auto day_count = sys_days{ymd}.time_since_epoch().count();
    return Timestamp(static_cast<std::int64_t>(day_count) * 24 + hour);
}

Timestamp Timestamp::parse(std::string_view text) {
    // YYYY-MM-DDTHH:00:00Z
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text.substr(13) != ":00:00Z") {
        throw ArgumentError("timestamp '" + std::string(text) + "' is not of the form YYYY-MM-DDTHH:00:00Z");
    }
    const auto year = static_cast<int>(parse_digits(text, 0, 4));
    const auto month = parse_digits(text, 5, 2);
    const auto day = parse_digits(text, 8, 2);
    const auto hour = parse_digits(text, 11, 2);
    return from_civil(year, month, day, hour);
}

int Timestamp::year() const { return static_cast<int>(civil_date(hours_).year()); }

unsigned Timestamp::month() const { return static_cast<unsigned>(civil_date(hours_).month()); }

unsigned Timestamp::day() const { return static_cast<unsigned>(civil_date(hours_).day()); }

unsigned Timestamp::hour() const {
    const auto h = hours_ % 24;
    return static_cast<unsigned>(h < 0 ? h + 24 : h);
}

unsigned Timestamp::hour_of_week() const {
    // 1970-01-01 was a Thursday, 72 hours after Monday 00:00.
    const auto h = (hours_ + 72) % 168;
    return static_cast<unsigned>(h < 0 ? h + 168 : h);
}

std::string Timestamp::to_string() const {
    const auto ymd = civil_date(hours_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:00:00Z", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hour());
    return buf;
}

Season season_of_month(unsigned month) {
    switch (month) {
        case 3: case 4: case 5:
            return Season::Spring;
        case 6: case 7: case 8:
            return Season::Summer;
        case 9: case 10: case 11:
            return Season::Fall;
        case 12: case 1: case 2:
            return Season::Winter;
        default:
            throw ArgumentError("month out of range: " + std::to_string(month));
    }
}

Season assign_season(Timestamp ts) { return season_of_month(ts.month()); }

std::string_view season_name(Season season) {
    switch (season) {
        case Season::Spring: return "spring";
        case Season::Summer: return "summer";
        case Season::Fall: return "fall";
        case Season::Winter: return "winter";
    }
    return "unknown";
}

std::string_view season_label(Season season) {
    switch (season) {
        case Season::Spring: return "Spring";
        case Season::Summer: return "Summer";
        case Season::Fall: return "Fall";
        case Season::Winter: return "Winter";
    }
    return "Unknown";
}

Season parse_season(std::string_view name) {
    for (auto s : kAllSeasons) {
        if (season_name(s) == name) {
            return s;
        }
    }
    throw ArgumentError("unknown season '" + std::string(name) + "'");
}

}  // namespace pricecast
