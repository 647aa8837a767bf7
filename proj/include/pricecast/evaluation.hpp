#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pricecast/calendar.hpp"
#include "pricecast/data.hpp"
#include "pricecast/model.hpp"

namespace pricecast {

/// Denominator guard for MAPE, in $/MWh.
inline constexpr double kMapeGuard = 1e-6;

/// Mean absolute percentage error, in percent: mean(|y - yhat| / y) * 100.
/// Throws ArgumentError on empty/mismatched input and MetricError if any
/// |actual| <= kMapeGuard.
double mape(std::span<const double> actual, std::span<const double> predicted);

/// Root mean squared error in price units.
double rmse(std::span<const double> actual, std::span<const double> predicted);

struct MetricsRow {
    Season season = Season::Spring;
    std::string model_name;
    double mape = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

/// Metrics over a whole group of predictions (Average/Pooled rows).
struct SummaryRow {
    std::string model_name;
    double mape = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

/// Denormalized targets of `windows`.
std::vector<double> window_actuals(std::span<const WindowSample> windows, const NormStats& stats);

/// Last observed hour of each window, denormalized, as the next-hour forecast.
std::vector<double> persistence_forecast(std::span<const WindowSample> windows, const NormStats& stats);

/// Denormalized one-step predictions of `model` for each window.
std::vector<double> predict_windows(const Model& model, std::span<const WindowSample> windows);

MetricsRow metrics_row(std::string model_name, Season season, std::span<const double> actual,
                       std::span<const double> predicted);
SummaryRow pooled_row(std::string model_name, std::span<const double> actual, std::span<const double> predicted);

/// Season is taken from the first window's target hour.
MetricsRow evaluate_model(const Model& model, std::span<const WindowSample> test_windows);

struct Report {
    std::vector<MetricsRow> rows;
    /// Arithmetic mean of the four seasonal values per model.
    std::vector<SummaryRow> averages;
    /// Metrics over all test hours per model, when supplied.
    std::vector<SummaryRow> pooled;
};

/// Throws ReportError if any model lacks one of the four seasons.
Report build_report(std::vector<MetricsRow> rows, std::vector<SummaryRow> pooled = {});

/// Two-decimal rendering used in reports.
std::string format_2dp(double value);

/// `model,season,mape,rmse,n` rows, then Average and Pooled rows per model.
std::string report_csv(const Report& report);

/// `timestamp,actual,predicted` for `hours` consecutive hours from `start`,
/// each predicted one step ahead from the true preceding 23 hours.
/// Throws DataError if the series does not cover [start - 23h, start + hours).
std::string emit_forecast_csv(const Model& model, const PriceSeries& series, Timestamp start, std::size_t hours);

}  // namespace pricecast
