#include "pricecast/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct RawRow {
    PriceRecord record;
    std::size_t line = 0;
};

double parse_price(std::string_view field, std::size_t line) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line, "malformed price '" + std::string(field) + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(line, "price must be finite");
    }
    return value;
}

}  // namespace

double normalize(double x, const NormStats& stats) {
    if (!(stats.max > stats.min)) {
        throw DataError("normalization stats require max > min (constant series?)");
    }
    return (x - stats.min) / (stats.max - stats.min);
}

double denormalize(double x, const NormStats& stats) {
    if (!(stats.max > stats.min)) {
        throw DataError("normalization stats require max > min (constant series?)");
    }
    return x * (stats.max - stats.min) + stats.min;
}

std::size_t PriceSeries::index_of(Timestamp ts) const noexcept {
    if (records.empty()) {
        return 0;
    }
    const auto offset = ts - records.front().timestamp;
    if (offset < 0 || offset >= static_cast<std::int64_t>(records.size())) {
        return records.size();
    }
    return static_cast<std::size_t>(offset);
}

ParsedSeries parse_price_csv(std::istream& in) {
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (text != "timestamp,price") {
                throw ParseError(line_no, "expected header 'timestamp,price'");
            }
            header_seen = true;
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
            throw ParseError(line_no, "expected exactly two fields");
        }
        RawRow row;
        row.line = line_no;
        try {
            row.record.timestamp = Timestamp::parse(trim(text.substr(0, comma)));
        } catch (const ArgumentError& e) {
            throw ParseError(line_no, e.what());
        }
        row.record.price = parse_price(trim(text.substr(comma + 1)), line_no);
        rows.push_back(row);
    }
    if (!header_seen) {
        throw ParseError(line_no == 0 ? 1 : line_no, "missing header 'timestamp,price'");
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.record.timestamp < b.record.timestamp; });

    ParsedSeries parsed;
    auto& records = parsed.series.records;
    records.reserve(rows.size());
    for (std::size_t n = 0; n < rows.size(); ++n) {
        const auto& cur = rows[n].record;
        if (n > 0) {
            const auto& prev = rows[n - 1].record;
            const auto step = cur.timestamp - prev.timestamp;
            if (step == 0) {
                const auto dup_line = std::max(rows[n - 1].line, rows[n].line);
                throw ParseError(dup_line, "duplicate timestamp " + cur.timestamp.to_string());
            }
            const auto missing = step - 1;
            if (missing > kMaxInterpolatedGap) {
                throw DataError("gap of " + std::to_string(missing) + " hours between " +
                                prev.timestamp.to_string() + " and " + cur.timestamp.to_string() +
                                " exceeds the " + std::to_string(kMaxInterpolatedGap) + "-hour repair limit");
            }
            for (std::int64_t h = 1; h <= missing; ++h) {
                const double frac = static_cast<double>(h) / static_cast<double>(step);
                records.push_back({prev.timestamp + h, prev.price + frac * (cur.price - prev.price)});
                ++parsed.interpolated;
            }
        }
        records.push_back(cur);
    }
    return parsed;
}

ParsedSeries parse_price_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_price_csv(in);
}

std::string serialize_price_csv(const PriceSeries& series) {
    std::string out = "timestamp,price\n";
    out.reserve(out.size() + series.size() * 32);
    char buf[64];
    for (const auto& r : series.records) {
        out += r.timestamp.to_string();
        out += ',';
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r.price);
        out.append(buf, ptr);
        out += '\n';
    }
    return out;
}

Partition classify_target(Timestamp target, const PeriodBounds& bounds) {
    const int year = target.year();
    if (year >= bounds.train_first_year && year <= bounds.train_last_year) {
        return Partition::Train;
    }
    const unsigned month = target.month();
    if (season_of_month(month) == Season::Winter) {
        const bool in_test_winter = (year == bounds.test_year && month == 12) ||
                                    (year == bounds.test_year + 1 && month <= 2);
        return in_test_winter ? Partition::Test : Partition::Excluded;
    }
    return year == bounds.test_year ? Partition::Test : Partition::Excluded;
}

TrainTestSplit split_train_test(const PriceSeries& series, const PeriodBounds& bounds) {
    TrainTestSplit split;
    for (const auto& r : series.records) {
        switch (classify_target(r.timestamp, bounds)) {
            case Partition::Train: split.train.records.push_back(r); break;
            case Partition::Test: split.test.records.push_back(r); break;
            case Partition::Excluded: break;
        }
    }
    if (split.train.empty()) {
        throw DataError("training partition is empty (years " + std::to_string(bounds.train_first_year) + "-" +
                        std::to_string(bounds.train_last_year) + ")");
    }
    if (split.test.empty()) {
        throw DataError("test partition is empty (test year " + std::to_string(bounds.test_year) + ")");
    }
    return split;
}

namespace {

template <class Accept>
std::vector<WindowSample> windows_where(const PriceSeries& series, Season season, const NormStats& stats,
                                        Accept accept) {
    // Validates stats even when no window qualifies.
    (void)normalize(stats.min, stats);
    std::vector<WindowSample> out;
    const auto& recs = series.records;
    for (std::size_t t = kHistoryHours; t < recs.size(); ++t) {
        const auto ts = recs[t].timestamp;
        if (assign_season(ts) != season || !accept(ts)) {
            continue;
        }
        if (ts - recs[t - kHistoryHours].timestamp != static_cast<std::int64_t>(kHistoryHours)) {
            throw DataError("series is not contiguous before " + ts.to_string());
        }
        Tensor input(Shape{kHistoryHours}, 0.0);
        for (std::size_t j = 0; j < kHistoryHours; ++j) {
            input[j] = normalize(recs[t - kHistoryHours + j].price, stats);
        }
        out.push_back({std::move(input), normalize(recs[t].price, stats), ts});
    }
    return out;
}

}  // namespace

std::vector<WindowSample> make_windows(const PriceSeries& series, Season season, const NormStats& stats) {
    return windows_where(series, season, stats, [](Timestamp) { return true; });
}

std::vector<WindowSample> make_windows(const PriceSeries& series, Season season, const NormStats& stats,
                                       const PeriodBounds& bounds, Partition partition) {
    return windows_where(series, season, stats,
                         [&](Timestamp ts) { return classify_target(ts, bounds) == partition; });
}

FittedStats fit_norm_stats(const PriceSeries& series, Season season, const PeriodBounds& bounds) {
    FittedStats fitted;
    fitted.stats = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    bool any = false;
    const auto& recs = series.records;
    for (std::size_t t = kHistoryHours; t < recs.size(); ++t) {
        const auto ts = recs[t].timestamp;
        if (assign_season(ts) != season || classify_target(ts, bounds) != Partition::Train) {
            continue;
        }
        for (std::size_t j = t - kHistoryHours; j <= t; ++j) {
            fitted.stats.min = std::min(fitted.stats.min, recs[j].price);
            fitted.stats.max = std::max(fitted.stats.max, recs[j].price);
        }
        fitted.latest_hour = ts;
        any = true;
    }
    if (!any) {
        throw DataError("no training windows for " + std::string(season_name(season)));
    }
    if (!(fitted.stats.max > fitted.stats.min)) {
        throw DataError("constant training prices for " + std::string(season_name(season)) +
                        "; cannot normalize");
    }
    return fitted;
}

SeasonalDataset build_seasonal_dataset(const PriceSeries& series, Season season, const PeriodBounds& bounds) {
    SeasonalDataset ds;
    ds.season = season;
    const auto fitted = fit_norm_stats(series, season, bounds);
    ds.stats = fitted.stats;
    ds.stats_latest_hour = fitted.latest_hour;
    ds.train = make_windows(series, season, ds.stats, bounds, Partition::Train);
    ds.test = make_windows(series, season, ds.stats, bounds, Partition::Test);
    const auto name = std::string(season_name(season));
    if (ds.train.empty()) {
        throw DataError("no training windows for " + name);
    }
    if (ds.test.empty()) {
        throw DataError("no test windows for " + name);
    }
    if (!(ds.stats_latest_hour < ds.test.front().target_time)) {
        throw DataError("normalization stats for " + name + " overlap the test period");
    }
    return ds;
}

std::array<SeasonalDataset, 4> build_seasonal_datasets(const PriceSeries& series, const PeriodBounds& bounds) {
    std::array<SeasonalDataset, 4> out;
    for (std::size_t n = 0; n < kAllSeasons.size(); ++n) {
        out[n] = build_seasonal_dataset(series, kAllSeasons[n], bounds);
    }
    return out;
}

PriceSeries generate_synthetic(Timestamp start, std::size_t hours, std::uint64_t seed, double noise_sigma) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    constexpr double kFloorPrice = 1.0;  // keeps every price strictly positive

    Prng prng(seed);
    PriceSeries series;
    series.records.reserve(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        const Timestamp ts = start + static_cast<std::int64_t>(h);
        const bool winter = assign_season(ts) == Season::Winter;
        double price = 30.0 + 8.0 * std::sin(kTwoPi * ts.hour() / 24.0) +
                       4.0 * std::sin(kTwoPi * ts.hour_of_week() / 168.0);
        // One draw per hour regardless of sigma, so streams align across noise levels.
        const double noise = prng.next_gaussian();
        if (winter) {
            price += 10.0 + 3.0 * noise_sigma * noise;
        } else {
            price += noise_sigma * noise;
        }
        series.records.push_back({ts, std::max(price, kFloorPrice)});
    }
    return series;
}

}  // namespace pricecast
