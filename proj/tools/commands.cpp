#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "pricecast/checkpoint.hpp"
#include "pricecast/config.hpp"
#include "pricecast/data.hpp"
#include "pricecast/errors.hpp"
#include "pricecast/evaluation.hpp"
#include "pricecast/gradcheck.hpp"
#include "pricecast/model.hpp"
#include "pricecast/training.hpp"

namespace pricecast::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())) || !out.flush()) {
        throw IoError("cannot write " + path.string());
    }
}

PriceSeries load_series(const fs::path& path) {
    return parse_price_csv(read_file(path)).series;
}

Timestamp parse_start(const std::string& text) {
    try {
        return Timestamp::parse(text);
    } catch (const ArgumentError& e) {
        throw ArgumentError(std::string("--start: ") + e.what());
    }
}

std::vector<Season> requested_seasons(const std::string& name) {
    if (name == "all") {
        return {kAllSeasons.begin(), kAllSeasons.end()};
    }
    return {parse_season(name)};
}

std::size_t thread_cap(std::size_t jobs) {
    if (const char* env = std::getenv("PRICECAST_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) {
            return std::min<std::size_t>(static_cast<std::size_t>(n), jobs);
        }
    }
    return jobs;
}

struct SeasonOutcome {
    Season season;
    Checkpoint checkpoint;
    std::string history;
};

SeasonOutcome train_season(const PriceSeries& series, Season season, Architecture arch, const RunConfig& config) {
    const auto dataset = build_seasonal_dataset(series, season, config.periods);
    Prng init(config.train.seed);
    Model model = arch == Architecture::Cnn ? build_paper_cnn(config.cnn, init) : build_bp_mlp(config.mlp, init);
    model.norm_stats = dataset.stats;
    model.meta.season = season;
    model.meta.seed = config.train.seed;

    auto result = train(std::move(model), dataset.train, config.train);
    SeasonOutcome outcome{season, {}, history_csv(result.history)};
    outcome.checkpoint.model = std::move(result.model);
    outcome.checkpoint.periods = config.periods;
    outcome.checkpoint.best_epoch = result.history.best_epoch;
    outcome.checkpoint.best_val_loss = result.history.best_val_loss;
    return outcome;
}

}  // namespace

fs::path checkpoint_path(const fs::path& dir, std::string_view model, std::string_view season) {
    return dir / (std::string(model) + "_" + std::string(season) + ".ckpt");
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kData;
    } catch (const SpecError& e) {
        err << "spec error: " << e.what() << "\n";
        return kSpec;
    } catch (const ShapeError& e) {
        err << "spec error: " << e.what() << "\n";
        return kSpec;
    } catch (const TrainingError& e) {
        err << "training error: " << e.what() << "\n";
        return kTraining;
    } catch (const CheckpointError& e) {
        err << "checkpoint error: " << e.what() << "\n";
        return kCheckpoint;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            const auto series = generate_synthetic(parse_start(args.start), args.hours, args.seed);
            write_file(args.out, serialize_price_csv(series));
            out << "wrote " << series.size() << " hours to " << args.out.string() << "\n";
            return kOk;
        },
        err);
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            const auto arch = parse_architecture(args.model);
            const auto seasons = requested_seasons(args.season);
            const RunConfig config = args.config ? parse_run_config(read_file(*args.config)) : RunConfig{};
            const auto series = load_series(args.data);

            std::error_code ec;
            fs::create_directories(args.out, ec);
            if (ec || !fs::is_directory(args.out)) {
                throw IoError("cannot create output directory " + args.out.string());
            }

            // Seasons are independent; results are collected in request order.
            std::vector<SeasonOutcome> outcomes;
            const std::size_t width = thread_cap(seasons.size());
            for (std::size_t begin = 0; begin < seasons.size(); begin += width) {
                std::vector<std::future<SeasonOutcome>> jobs;
                for (std::size_t n = begin; n < std::min(begin + width, seasons.size()); ++n) {
                    jobs.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred,
                                              train_season, std::cref(series), seasons[n], arch, std::cref(config)));
                }
                for (auto& job : jobs) {
                    outcomes.push_back(job.get());
                }
            }

            for (const auto& o : outcomes) {
                const auto name = season_name(o.season);
                save_checkpoint(o.checkpoint, checkpoint_path(args.out, args.model, name));
                write_file(args.out / (args.model + "_" + std::string(name) + "_history.csv"), o.history);
                out << args.model << " " << name << ": best epoch " << o.checkpoint.best_epoch << ", val loss "
                    << std::setprecision(6) << o.checkpoint.best_val_loss << "\n";
            }
            return kOk;
        },
        err);
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            bool with_persistence = false;
            std::vector<std::string> models{"cnn"};
            for (const auto& b : args.baselines) {
                if (b == "persistence") {
                    with_persistence = true;
                } else if (b == "bp") {
                    models.push_back("bp");
                } else if (!b.empty()) {
                    throw ArgumentError("unknown baseline '" + b + "' (expected persistence or bp)");
                }
            }

            // All checkpoints are loaded before touching the data so a
            // missing season fails fast with exit 6.
            std::map<std::string, std::vector<Checkpoint>> loaded;
            for (const auto& name : models) {
                for (auto season : kAllSeasons) {
                    const auto path = checkpoint_path(args.checkpoints, name, season_name(season));
                    if (!fs::exists(path)) {
                        throw CheckpointError("missing checkpoint " + path.string());
                    }
                    auto ck = load_checkpoint(path);
                    if (ck.model.meta.season != season) {
                        throw CheckpointError(path.filename().string() + " holds a different season");
                    }
                    loaded[name].push_back(std::move(ck));
                }
            }

            const auto series = load_series(args.data);
            std::vector<MetricsRow> rows;
            std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> pooled;
            const auto record = [&](const std::string& name, Season season, const std::vector<double>& actual,
                                    const std::vector<double>& predicted) {
                rows.push_back(metrics_row(name, season, actual, predicted));
                auto& [pa, pp] = pooled[name];
                pa.insert(pa.end(), actual.begin(), actual.end());
                pp.insert(pp.end(), predicted.begin(), predicted.end());
            };

            for (std::size_t s = 0; s < kAllSeasons.size(); ++s) {
                const Season season = kAllSeasons[s];
                for (const auto& name : models) {
                    const auto& ck = loaded[name][s];
                    const auto windows =
                        make_windows(series, season, ck.model.norm_stats, ck.periods, Partition::Test);
                    if (windows.empty()) {
                        throw DataError("no test windows for " + std::string(season_name(season)));
                    }
                    record(name, season, window_actuals(windows, ck.model.norm_stats),
                           predict_windows(ck.model, windows));
                }
                if (with_persistence) {
                    const auto& ck = loaded["cnn"][s];
                    const auto windows =
                        make_windows(series, season, ck.model.norm_stats, ck.periods, Partition::Test);
                    record("persistence", season, window_actuals(windows, ck.model.norm_stats),
                           persistence_forecast(windows, ck.model.norm_stats));
                }
            }

            std::vector<SummaryRow> pooled_rows;
            for (const auto& row : rows) {
                if (std::none_of(pooled_rows.begin(), pooled_rows.end(),
                                 [&](const SummaryRow& p) { return p.model_name == row.model_name; })) {
                    const auto& [pa, pp] = pooled[row.model_name];
                    pooled_rows.push_back(pooled_row(row.model_name, pa, pp));
                }
            }
            const auto csv = report_csv(build_report(std::move(rows), std::move(pooled_rows)));
            write_file(args.out, csv);
            out << csv;
            return kOk;
        },
        err);
}

int cmd_forecast(const ForecastArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            const auto checkpoint = load_checkpoint(args.checkpoint);
            const auto series = load_series(args.data);
            const auto csv = emit_forecast_csv(checkpoint.model, series, parse_start(args.start), args.hours);
            write_file(args.out, csv);
            out << "wrote " << args.hours << " forecast rows to " << args.out.string() << "\n";
            return kOk;
        },
        err);
}

int cmd_gradcheck(const GradCheckArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(
        [&] {
            const auto c = make_gradcheck_case(parse_architecture(args.model), args.seed);
            const double worst = grad_check(c.model, c.sample, kGradCheckEpsilon);
            out << args.model << " seed " << args.seed << ": " << model_param_count(c.model)
                << " parameters, max relative error " << std::scientific << std::setprecision(3) << worst << "\n";
            return worst < kGradCheckTolerance ? kOk : kGradCheck;
        },
        err);
}

}  // namespace pricecast::cli
