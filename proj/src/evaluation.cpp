#include "pricecast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted, const char* what) {
    if (actual.size() != predicted.size()) {
        throw ArgumentError(std::string(what) + ": actual has " + std::to_string(actual.size()) +
                            " values, predicted has " + std::to_string(predicted.size()));
    }
    if (actual.empty()) {
        throw ArgumentError(std::string(what) + ": no prediction points");
    }
}

}  // namespace

double mape(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "mape");
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (std::abs(actual[i]) <= kMapeGuard) {
            throw MetricError("mape: actual value at index " + std::to_string(i) + " is too close to zero");
        }
        total += std::abs(actual[i] - predicted[i]) / actual[i];
    }
    return total / static_cast<double>(actual.size()) * 100.0;
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted, "rmse");
    double total = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double d = actual[i] - predicted[i];
        total += d * d;
    }
    return std::sqrt(total / static_cast<double>(actual.size()));
}

std::vector<double> window_actuals(std::span<const WindowSample> windows, const NormStats& stats) {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        out.push_back(denormalize(w.target, stats));
    }
    return out;
}

std::vector<double> persistence_forecast(std::span<const WindowSample> windows, const NormStats& stats) {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        out.push_back(denormalize(w.input[w.input.size() - 1], stats));
    }
    return out;
}

std::vector<double> predict_windows(const Model& model, std::span<const WindowSample> windows) {
    std::vector<double> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        out.push_back(denormalize(model_forward(model, w.input), model.norm_stats));
    }
    return out;
}

MetricsRow metrics_row(std::string model_name, Season season, std::span<const double> actual,
                       std::span<const double> predicted) {
    return {season, std::move(model_name), mape(actual, predicted), rmse(actual, predicted), actual.size()};
}

SummaryRow pooled_row(std::string model_name, std::span<const double> actual, std::span<const double> predicted) {
    return {std::move(model_name), mape(actual, predicted), rmse(actual, predicted), actual.size()};
}

MetricsRow evaluate_model(const Model& model, std::span<const WindowSample> test_windows) {
    if (test_windows.empty()) {
        throw ArgumentError("evaluate_model: no test windows");
    }
    const auto actual = window_actuals(test_windows, model.norm_stats);
    const auto predicted = predict_windows(model, test_windows);
    return metrics_row(architecture_name(model.meta.spec), assign_season(test_windows.front().target_time), actual,
                       predicted);
}

Report build_report(std::vector<MetricsRow> rows, std::vector<SummaryRow> pooled) {
    std::vector<std::string> models;
    for (const auto& r : rows) {
        if (std::find(models.begin(), models.end(), r.model_name) == models.end()) {
            models.push_back(r.model_name);
        }
    }

    Report report;
    for (const auto& name : models) {
        SummaryRow avg{name, 0.0, 0.0, 0};
        for (auto season : kAllSeasons) {
            const auto it = std::find_if(rows.begin(), rows.end(), [&](const MetricsRow& r) {
                return r.model_name == name && r.season == season;
            });
            if (it == rows.end()) {
                throw ReportError("model '" + name + "' has no " + std::string(season_name(season)) + " row");
            }
            avg.mape += it->mape;
            avg.rmse += it->rmse;
            avg.n += it->n;
            report.rows.push_back(*it);
        }
        avg.mape /= static_cast<double>(kAllSeasons.size());
        avg.rmse /= static_cast<double>(kAllSeasons.size());
        report.averages.push_back(avg);
    }
    report.pooled = std::move(pooled);
    return report;
}

std::string format_2dp(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::string report_csv(const Report& report) {
    std::string out = "model,season,mape,rmse,n\n";
    const auto line = [&](const std::string& model, std::string_view season, double m, double r, std::size_t n) {
        out += model + "," + std::string(season) + "," + format_2dp(m) + "," + format_2dp(r) + "," +
               std::to_string(n) + "\n";
    };
    for (const auto& avg : report.averages) {
        for (const auto& r : report.rows) {
            if (r.model_name == avg.model_name) {
                line(r.model_name, season_label(r.season), r.mape, r.rmse, r.n);
            }
        }
        line(avg.model_name, "Average", avg.mape, avg.rmse, avg.n);
        for (const auto& p : report.pooled) {
            if (p.model_name == avg.model_name) {
                line(p.model_name, "Pooled", p.mape, p.rmse, p.n);
            }
        }
    }
    return out;
}

std::string emit_forecast_csv(const Model& model, const PriceSeries& series, Timestamp start, std::size_t hours) {
    std::string out = "timestamp,actual,predicted\n";
    if (hours == 0) {
        return out;
    }
    const auto history_start = start - static_cast<std::int64_t>(kHistoryHours);
    const auto last = start + static_cast<std::int64_t>(hours) - 1;
    const auto first_idx = series.index_of(history_start);
    if (first_idx >= series.size() || series.index_of(last) >= series.size()) {
        throw DataError("series does not cover " + history_start.to_string() + " .. " + last.to_string());
    }

    const auto& recs = series.records;
    Tensor window(Shape{kHistoryHours}, 0.0);
    char buf[128];
    for (std::size_t h = 0; h < hours; ++h) {
        const std::size_t target = first_idx + kHistoryHours + h;
        for (std::size_t j = 0; j < kHistoryHours; ++j) {
            window[j] = normalize(recs[target - kHistoryHours + j].price, model.norm_stats);
        }
        const double predicted = denormalize(model_forward(model, window), model.norm_stats);
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", recs[target].price, predicted);
        out += recs[target].timestamp.to_string();
        out += buf;
    }
    return out;
}

}  // namespace pricecast
