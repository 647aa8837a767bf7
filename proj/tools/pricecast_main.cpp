// pricecast: batch front end for hourly electricity-price forecasting.
//
//   pricecast synth     --out prices.csv --start 2015-01-01T00:00:00Z --hours 36528 --seed 42
//   pricecast train     --data prices.csv --model cnn --season all --out ckpt/
//   pricecast evaluate  --data prices.csv --checkpoints ckpt/ --baselines persistence,bp --out report.csv
//   pricecast forecast  --data prices.csv --checkpoint ckpt/cnn_spring.ckpt --start 2018-04-02T00:00:00Z --out week.csv
//   pricecast gradcheck --model cnn --seed 7

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    namespace cli = pricecast::cli;

    CLI::App app{"Hourly electricity price forecasting with a 1D CNN and baselines"};
    app.require_subcommand(1);

    cli::SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic hourly price CSV");
    synth_cmd->add_option("--out", synth.out, "Output CSV path")->required();
    synth_cmd->add_option("--start", synth.start, "First hour, YYYY-MM-DDTHH:00:00Z")->capture_default_str();
    synth_cmd->add_option("--hours", synth.hours, "Number of hours")->required();
    synth_cmd->add_option("--seed", synth.seed, "Noise seed")->capture_default_str();

    cli::TrainArgs train;
    std::string config_path;
    auto* train_cmd = app.add_subcommand("train", "Train one model per season");
    train_cmd->add_option("--data", train.data, "Price CSV")->required();
    train_cmd->add_option("--config", config_path, "key = value run configuration");
    train_cmd->add_option("--model", train.model, "cnn or bp")
        ->check(CLI::IsMember({"cnn", "bp"}))
        ->capture_default_str();
    train_cmd->add_option("--season", train.season, "all, spring, summer, fall or winter")
        ->check(CLI::IsMember({"all", "spring", "summer", "fall", "winter"}))
        ->capture_default_str();
    train_cmd->add_option("--out", train.out, "Checkpoint directory")->required();

    cli::EvaluateArgs evaluate;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score seasonal checkpoints on the test period");
    eval_cmd->add_option("--data", evaluate.data, "Price CSV")->required();
    eval_cmd->add_option("--checkpoints", evaluate.checkpoints, "Directory holding <model>_<season>.ckpt")
        ->required();
    eval_cmd->add_option("--baselines", evaluate.baselines, "Comma separated: persistence, bp")
        ->delimiter(',')
        ->capture_default_str();
    eval_cmd->add_option("--out", evaluate.out, "Report CSV path")->required();

    cli::ForecastArgs forecast;
    auto* forecast_cmd = app.add_subcommand("forecast", "One-step-ahead forecasts for a span of hours");
    forecast_cmd->add_option("--data", forecast.data, "Price CSV")->required();
    forecast_cmd->add_option("--checkpoint", forecast.checkpoint, "Checkpoint file")->required();
    forecast_cmd->add_option("--start", forecast.start, "First forecast hour")->required();
    forecast_cmd->add_option("--hours", forecast.hours, "Number of hours")->capture_default_str();
    forecast_cmd->add_option("--out", forecast.out, "Forecast CSV path")->required();

    cli::GradCheckArgs gradcheck;
    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "Compare backprop against finite differences");
    gradcheck_cmd->add_option("--model", gradcheck.model, "cnn or bp")
        ->check(CLI::IsMember({"cnn", "bp"}))
        ->capture_default_str();
    gradcheck_cmd->add_option("--seed", gradcheck.seed, "Architecture and sample seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*synth_cmd) {
        return cli::cmd_synth(synth, std::cout, std::cerr);
    }
    if (*train_cmd) {
        if (!config_path.empty()) {
            train.config = config_path;
        }
        return cli::cmd_train(train, std::cout, std::cerr);
    }
    if (*eval_cmd) {
        return cli::cmd_evaluate(evaluate, std::cout, std::cerr);
    }
    if (*forecast_cmd) {
        return cli::cmd_forecast(forecast, std::cout, std::cerr);
    }
    return cli::cmd_gradcheck(gradcheck, std::cout, std::cerr);
}
