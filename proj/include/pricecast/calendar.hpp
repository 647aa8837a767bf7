#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pricecast {

/// A UTC calendar hour, stored as whole hours since 1970-01-01T00:00:00Z.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t hours_since_epoch) : hours_(hours_since_epoch) {}

    static Timestamp from_civil(int year, unsigned month, unsigned day, unsigned hour);

    /// Strict `YYYY-MM-DDTHH:00:00Z`; throws ArgumentError otherwise.
    static Timestamp parse(std::string_view text);

    std::int64_t hours_since_epoch() const noexcept { return hours_; }

    int year() const;
    unsigned month() const;
    unsigned day() const;
    unsigned hour() const;
    /// Hours since the most recent Monday 00:00, in [0, 168).
    unsigned hour_of_week() const;

    std::string to_string() const;

    constexpr Timestamp operator+(std::int64_t hours) const { return Timestamp(hours_ + hours); }
    constexpr Timestamp operator-(std::int64_t hours) const { return Timestamp(hours_ - hours); }
    constexpr std::int64_t operator-(Timestamp other) const { return hours_ - other.hours_; }

    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

private:
    std::int64_t hours_ = 0;
};

enum class Season { Spring, Summer, Fall, Winter };

inline constexpr std::array<Season, 4> kAllSeasons{Season::Spring, Season::Summer, Season::Fall, Season::Winter};

/// Mar-May spring, Jun-Aug summer, Sep-Nov fall, Dec-Feb winter.
Season assign_season(Timestamp ts);
Season season_of_month(unsigned month);

/// Lower-case name, e.g. "spring".
std::string_view season_name(Season season);
/// Title-case label used in reports, e.g. "Spring".
std::string_view season_label(Season season);
/// Accepts the lower-case name; throws ArgumentError otherwise.
Season parse_season(std::string_view name);

}  // namespace pricecast
