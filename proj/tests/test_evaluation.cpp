#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pricecast/errors.hpp"
#include "pricecast/evaluation.hpp"
#include "pricecast/training.hpp"

using namespace pricecast;

namespace {

Timestamp ts(const char* text) { return Timestamp::parse(text); }

// A single dense layer that copies the most recent hour of the window.
Model persistence_model(const NormStats& stats) {
    Tensor w(Shape({1, kWindowLength}), 0.0);
    w[kWindowLength - 1] = 1.0;
    Model model;
    model.layers.push_back(Dense{w, Tensor(Shape({1}), 0.0)});
    model.norm_stats = stats;
    return model;
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(Metrics, HandEvaluatedExamples) {
    const std::vector<double> y{100.0, 200.0};
    const std::vector<double> yhat{110.0, 180.0};
    EXPECT_NEAR(mape(y, yhat), 10.0, 1e-9);
    const std::vector<double> zeros{0.0, 0.0};
    const std::vector<double> p{3.0, 4.0};
    EXPECT_NEAR(rmse(zeros, p), std::sqrt(12.5), 1e-9);
}

TEST(Metrics, ZeroActualIsAnError) {
    const std::vector<double> y{0.0, 50.0};
    const std::vector<double> yhat{1.0, 50.0};
    EXPECT_THROW(mape(y, yhat), MetricError);
    const std::vector<double> tiny{1e-7, 50.0};
    EXPECT_THROW(mape(tiny, yhat), MetricError);
    EXPECT_NO_THROW(rmse(y, yhat));
}

TEST(Metrics, ShapeErrors) {
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    const std::vector<double> empty;
    EXPECT_THROW(mape(a, b), ArgumentError);
    EXPECT_THROW(rmse(a, b), ArgumentError);
    EXPECT_THROW(mape(empty, empty), ArgumentError);
    EXPECT_THROW(rmse(empty, empty), ArgumentError);
}

TEST(Metrics, PerfectPredictionIsZero) {
    const std::vector<double> y{12.0, 30.5, 41.25};
    EXPECT_EQ(mape(y, y), 0.0);
    EXPECT_EQ(rmse(y, y), 0.0);
}

TEST(Metrics, RmseBoundsMeanAbsoluteError) {
    Prng prng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + prng.next_below(50);
        std::vector<double> y(n), yhat(n);
        double mae = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = 10.0 + 50.0 * prng.next_uniform();
            yhat[i] = 10.0 + 50.0 * prng.next_uniform();
            mae += std::abs(y[i] - yhat[i]);
        }
        mae /= static_cast<double>(n);
        ASSERT_GE(rmse(y, yhat) + 1e-12, mae);
    }
}

TEST(Metrics, ScaleAndPermutationInvariance) {
    Prng prng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + prng.next_below(40);
        std::vector<double> y(n), yhat(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = 5.0 + 60.0 * prng.next_uniform();
            yhat[i] = 5.0 + 60.0 * prng.next_uniform();
        }
        const double alpha = 0.1 + 10.0 * prng.next_uniform();
        std::vector<double> ys(n), yhats(n);
        for (std::size_t i = 0; i < n; ++i) {
            ys[i] = alpha * y[i];
            yhats[i] = alpha * yhat[i];
        }
        ASSERT_NEAR(mape(ys, yhats), mape(y, yhat), 1e-9);
        ASSERT_NEAR(rmse(ys, yhats), alpha * rmse(y, yhat), 1e-9);

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[prng.next_below(i + 1)]);
        std::vector<double> yp(n), yhatp(n);
        for (std::size_t i = 0; i < n; ++i) {
            yp[i] = y[order[i]];
            yhatp[i] = yhat[order[i]];
        }
        ASSERT_NEAR(mape(yp, yhatp), mape(y, yhat), 1e-9);
        ASSERT_NEAR(rmse(yp, yhatp), rmse(y, yhat), 1e-9);
    }
}

TEST(Persistence, RepeatsLastHour) {
    // Hourly prices 1, 2, 4 after a flat history: predictions 1, 2 for actuals 2, 4.
    PriceSeries series;
    const auto start = ts("2018-04-01T00:00:00Z");
    for (std::size_t i = 0; i < 22; ++i) series.records.push_back({start + static_cast<std::int64_t>(i), 1.0});
    series.records.push_back({start + 22, 1.0});
    series.records.push_back({start + 23, 2.0});
    series.records.push_back({start + 24, 4.0});
    const NormStats stats{0.0, 10.0};
    const auto windows = make_windows(series, Season::Spring, stats);
    ASSERT_EQ(windows.size(), 2u);
    const auto actual = window_actuals(windows, stats);
    const auto predicted = persistence_forecast(windows, stats);
    EXPECT_NEAR(actual[0], 2.0, 1e-12);
    EXPECT_NEAR(actual[1], 4.0, 1e-12);
    EXPECT_NEAR(predicted[0], 1.0, 1e-12);
    EXPECT_NEAR(predicted[1], 2.0, 1e-12);
    EXPECT_NEAR(mape(actual, predicted), 50.0, 1e-9);
}

TEST(Persistence, DenseCopyModelMatchesExactly) {
    const auto series = generate_synthetic(ts("2018-03-01T00:00:00Z"), 24 * 30, 8);
    const NormStats stats{5.0, 70.0};
    const auto windows = make_windows(series, Season::Spring, stats);
    const auto model = persistence_model(stats);
    const auto row = evaluate_model(model, windows);
    const auto actual = window_actuals(windows, stats);
    const auto baseline = persistence_forecast(windows, stats);
    EXPECT_EQ(row.season, Season::Spring);
    EXPECT_EQ(row.n, windows.size());
    EXPECT_EQ(row.mape, mape(actual, baseline));
    EXPECT_EQ(row.rmse, rmse(actual, baseline));
}

TEST(EvaluateModel, TrainingBeatsInitialization) {
    PeriodBounds bounds{2017, 2017, 2018};
    const auto series = generate_synthetic(ts("2017-02-01T00:00:00Z"), 24 * 500, 42);
    const auto data = build_seasonal_dataset(series, Season::Spring, bounds);
    Prng prng(5);
    auto model = build_bp_mlp(MlpSpec{{16}}, prng);
    model.norm_stats = data.stats;
    const auto before = evaluate_model(model, data.test);
    TrainConfig config;
    config.epochs = 30;
    config.learning_rate = 3e-3;
    const auto result = train(model, data.train, config);
    const auto after = evaluate_model(result.model, data.test);
    EXPECT_LT(after.mape, before.mape);
    EXPECT_LT(after.rmse, before.rmse);
    EXPECT_LT(after.mape, 15.0);
}

TEST(Report, AveragesRenderToTwoDecimals) {
    std::vector<MetricsRow> rows;
    const double mapes[] = {5.36, 5.18, 5.38, 5.49};
    const double rmses[] = {2.19, 2.85, 3.03, 4.13};
    for (std::size_t i = 0; i < 4; ++i) {
        rows.push_back({kAllSeasons[i], "cnn", mapes[i], rmses[i], 10});
    }
    const auto report = build_report(rows);
    ASSERT_EQ(report.averages.size(), 1u);
    EXPECT_NEAR(report.averages[0].mape, (5.36 + 5.18 + 5.38 + 5.49) / 4.0, 1e-9);
    EXPECT_EQ(format_2dp(report.averages[0].mape), "5.35");
    EXPECT_EQ(format_2dp(report.averages[0].rmse), "3.05");
    EXPECT_EQ(report.averages[0].n, 40u);
}

TEST(Report, MissingSeasonIsRejected) {
    std::vector<MetricsRow> rows{{Season::Spring, "cnn", 1.0, 1.0, 1},
                                 {Season::Summer, "cnn", 1.0, 1.0, 1},
                                 {Season::Fall, "cnn", 1.0, 1.0, 1}};
    EXPECT_THROW(build_report(rows), ReportError);
    rows.push_back({Season::Winter, "cnn", 1.0, 1.0, 1});
    rows.push_back({Season::Winter, "bp", 1.0, 1.0, 1});
    EXPECT_THROW(build_report(rows), ReportError);
}

TEST(Report, CsvLayout) {
    std::vector<MetricsRow> rows;
    for (auto s : kAllSeasons) rows.push_back({s, "cnn", 5.0, 2.0, 3});
    for (auto s : kAllSeasons) rows.push_back({s, "persistence", 7.0, 3.0, 3});
    const auto report = build_report(rows, {{"cnn", 4.5, 1.5, 12}, {"persistence", 6.5, 2.5, 12}});
    const auto csv = report_csv(report);
    EXPECT_EQ(csv,
              "model,season,mape,rmse,n\n"
              "cnn,Spring,5.00,2.00,3\ncnn,Summer,5.00,2.00,3\ncnn,Fall,5.00,2.00,3\ncnn,Winter,5.00,2.00,3\n"
              "cnn,Average,5.00,2.00,12\ncnn,Pooled,4.50,1.50,12\n"
              "persistence,Spring,7.00,3.00,3\npersistence,Summer,7.00,3.00,3\npersistence,Fall,7.00,3.00,3\n"
              "persistence,Winter,7.00,3.00,3\npersistence,Average,7.00,3.00,12\npersistence,Pooled,6.50,2.50,12\n");
}

TEST(ForecastCsv, RowCountsAndHistory) {
    const auto series = generate_synthetic(ts("2018-03-20T00:00:00Z"), 24 * 30, 4);
    const NormStats stats{0.0, 80.0};
    const auto model = persistence_model(stats);
    const auto start = ts("2018-04-02T00:00:00Z");
    const auto week = emit_forecast_csv(model, series, start, 168);
    EXPECT_EQ(count_lines(week), 169u);
    EXPECT_EQ(week.substr(0, week.find('\n')), "timestamp,actual,predicted");
    EXPECT_EQ(emit_forecast_csv(model, series, start, 0), "timestamp,actual,predicted\n");
    EXPECT_THROW(emit_forecast_csv(model, series, ts("2018-03-20T10:00:00Z"), 5), DataError);
    EXPECT_THROW(emit_forecast_csv(model, series, ts("2018-04-18T00:00:00Z"), 168), DataError);
    EXPECT_EQ(week, emit_forecast_csv(model, series, start, 168));
}

TEST(ForecastCsv, PerfectModelReproducesActuals) {
    // The copy model is exact on a constant series.
    PriceSeries series;
    const auto start = ts("2018-04-01T00:00:00Z");
    for (std::int64_t i = 0; i < 60; ++i) series.records.push_back({start + i, 42.0});
    const auto csv = emit_forecast_csv(persistence_model(NormStats{0.0, 100.0}), series, start + 23, 10);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        EXPECT_EQ(line.substr(a + 1, b - a - 1), line.substr(b + 1));
        ++rows;
    }
    EXPECT_EQ(rows, 10u);
}
