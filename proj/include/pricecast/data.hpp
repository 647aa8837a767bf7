#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "pricecast/calendar.hpp"
#include "pricecast/norm_stats.hpp"
#include "pricecast/tensor.hpp"

namespace pricecast {

struct PriceRecord {
    Timestamp timestamp;
    double price = 0.0;  // $/MWh

    friend bool operator==(const PriceRecord&, const PriceRecord&) = default;
};

/// Hourly prices, strictly increasing and exactly one hour apart.
struct PriceSeries {
    std::vector<PriceRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
    /// Index of `ts`, or size() when the series does not cover it.
    std::size_t index_of(Timestamp ts) const noexcept;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;
};

/// Longest run of missing hours repaired by linear interpolation.
inline constexpr std::int64_t kMaxInterpolatedGap = 6;

struct ParsedSeries {
    PriceSeries series;
    std::size_t interpolated = 0;
};

/// Reads `timestamp,price` CSV. `#` comment lines and blank lines are skipped;
/// rows may arrive in any order. Throws ParseError (malformed row, duplicate
/// timestamp) or DataError (gap wider than kMaxInterpolatedGap).
ParsedSeries parse_price_csv(std::istream& in);
ParsedSeries parse_price_csv(std::string_view text);

/// Writes the same CSV format with shortest round-trip decimal prices.
std::string serialize_price_csv(const PriceSeries& series);

/// Years feeding each partition. Winter testing runs December of test_year
/// through February of the following year so the test winter is contiguous.
struct PeriodBounds {
    int train_first_year = 2015;
    int train_last_year = 2017;
    int test_year = 2018;

    friend bool operator==(const PeriodBounds&, const PeriodBounds&) = default;
};

enum class Partition { Train, Test, Excluded };

Partition classify_target(Timestamp target, const PeriodBounds& bounds);

struct TrainTestSplit {
    PriceSeries train;  // hours classified Train
    PriceSeries test;   // hours classified Test
};

/// Throws DataError if either partition is empty.
TrainTestSplit split_train_test(const PriceSeries& series, const PeriodBounds& bounds = {});

/// One supervised sample: 23 normalized prices preceding target_time.
struct WindowSample {
    Tensor input;
    double target = 0.0;  // normalized
    Timestamp target_time;
};

inline constexpr std::size_t kHistoryHours = 23;

/// One sample per hour t in `season` with t-23..t-1 present. The history may
/// cross a season boundary; the target hour decides membership.
std::vector<WindowSample> make_windows(const PriceSeries& series, Season season, const NormStats& stats);

/// As above, restricted to targets in `partition`.
std::vector<WindowSample> make_windows(const PriceSeries& series, Season season, const NormStats& stats,
                                       const PeriodBounds& bounds, Partition partition);

struct FittedStats {
    NormStats stats;
    Timestamp latest_hour;  // newest hour that contributed
};

/// Min/max over every hour (history and target) of the season's training windows.
FittedStats fit_norm_stats(const PriceSeries& series, Season season, const PeriodBounds& bounds);

struct SeasonalDataset {
    Season season = Season::Spring;
    NormStats stats;
    Timestamp stats_latest_hour;
    std::vector<WindowSample> train;
    std::vector<WindowSample> test;
};

/// Builds all four seasons and checks that no test hour reaches the stats.
std::array<SeasonalDataset, 4> build_seasonal_datasets(const PriceSeries& series, const PeriodBounds& bounds);
SeasonalDataset build_seasonal_dataset(const PriceSeries& series, Season season, const PeriodBounds& bounds);

/// Synthetic hourly prices:
///   30 + 8 sin(2 pi hour_of_day / 24) + 4 sin(2 pi hour_of_week / 168)
///   + 10 in winter, plus Gaussian noise (sigma, tripled in winter).
PriceSeries generate_synthetic(Timestamp start, std::size_t hours, std::uint64_t seed, double noise_sigma = 1.5);

}  // namespace pricecast
