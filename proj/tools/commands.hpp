#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pricecast::cli {

// Stable exit codes for scripting.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kIo = 2,
    kData = 3,
    kSpec = 4,
    kTraining = 5,
    kCheckpoint = 6,
    kGradCheck = 7,
};

struct SynthArgs {
    std::filesystem::path out;
    std::string start = "2015-01-01T00:00:00Z";
    std::size_t hours = 0;
    std::uint64_t seed = 42;
};

struct TrainArgs {
    std::filesystem::path data;
    std::optional<std::filesystem::path> config;
    std::string model = "cnn";
    std::string season = "all";
    std::filesystem::path out;
};

struct EvaluateArgs {
    std::filesystem::path data;
    std::filesystem::path checkpoints;
    std::vector<std::string> baselines{"persistence", "bp"};
    std::filesystem::path out;
};

struct ForecastArgs {
    std::filesystem::path data;
    std::filesystem::path checkpoint;
    std::string start;
    std::size_t hours = 168;
    std::filesystem::path out;
};

struct GradCheckArgs {
    std::string model = "cnn";
    std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_forecast(const ForecastArgs& args, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradCheckArgs& args, std::ostream& out, std::ostream& err);

/// Runs `body`, translating library exceptions into exit codes with a message on `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

/// `<model>_<season>.ckpt` inside `dir`.
std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::string_view model,
                                      std::string_view season);

}  // namespace pricecast::cli
