#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "pricecast/checkpoint.hpp"
#include "pricecast/config.hpp"
#include "pricecast/errors.hpp"

using namespace pricecast;

namespace {

std::string spec_error_of(std::string_view text) {
    try {
        parse_run_config(text);
    } catch (const SpecError& e) {
        return e.what();
    }
    return {};
}

Checkpoint sample_checkpoint(const ModelSpec& spec, std::uint64_t seed) {
    Prng prng(seed);
    Checkpoint ckpt;
    if (const auto* cnn = std::get_if<CnnSpec>(&spec)) {
        ckpt.model = build_paper_cnn(*cnn, prng);
    } else {
        ckpt.model = build_bp_mlp(std::get<MlpSpec>(spec), prng);
    }
    // Non-zero biases so every parameter tensor carries awkward doubles.
    for (auto* p : model_parameters(ckpt.model)) {
        for (auto& v : p->data()) v += 1e-3 * prng.next_gaussian();
    }
    ckpt.model.norm_stats = NormStats{3.141592653589793, 77.7};
    ckpt.model.meta.season = Season::Winter;
    ckpt.model.meta.seed = seed;
    ckpt.best_epoch = 17;
    ckpt.best_val_loss = 0.0012345678901234567;
    return ckpt;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("pricecast_ckpt_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(RunConfig, EmptyTextGivesDefaults) {
    EXPECT_EQ(parse_run_config(""), RunConfig{});
    EXPECT_EQ(parse_run_config("# only a comment\n\n"), RunConfig{});
}

TEST(RunConfig, ParsesEveryKey) {
    const auto config = parse_run_config(
        "cnn.conv_channels = 4, 4, 4\n"
        "cnn.kernel = 2\n"
        "cnn.pool_width = 2\n"
        "cnn.dense_widths =\n"
        "mlp.hidden_widths = 10\n"
        "train.learning_rate = 0.01\n"
        "train.epochs = 3\n"
        "train.batch_size = 8\n"
        "train.seed = 9\n"
        "train.patience = 2\n"
        "train.val_fraction = 0.25\n"
        "train.clip_gradients = true\n"
        "period.train_first_year = 2016\n"
        "period.train_last_year = 2016\n"
        "period.test_year = 2017\n");
    EXPECT_EQ(config.cnn.conv_channels, (std::vector<std::size_t>{4, 4, 4}));
    EXPECT_EQ(config.cnn.kernel, 2u);
    EXPECT_TRUE(config.cnn.dense_widths.empty());
    EXPECT_EQ(config.mlp.hidden_widths, (std::vector<std::size_t>{10}));
    EXPECT_EQ(config.train.learning_rate, 0.01);
    EXPECT_EQ(config.train.epochs, 3u);
    EXPECT_EQ(config.train.batch_size, 8u);
    EXPECT_EQ(config.train.seed, 9u);
    EXPECT_EQ(config.train.patience, 2u);
    EXPECT_EQ(config.train.val_fraction, 0.25);
    EXPECT_TRUE(config.train.clip_gradients);
    EXPECT_EQ(config.periods, (PeriodBounds{2016, 2016, 2017}));
}

TEST(RunConfig, RejectsBadInput) {
    EXPECT_NE(spec_error_of("cnn.kernal = 3\n").find("line 1"), std::string::npos);
    EXPECT_NE(spec_error_of("\ntrain.epochs = ten\n").find("line 2"), std::string::npos);
    EXPECT_FALSE(spec_error_of("train.epochs\n").empty());
    EXPECT_FALSE(spec_error_of("train.learning_rate = -1\n").empty());
    EXPECT_FALSE(spec_error_of("train.val_fraction = 1\n").empty());
    EXPECT_FALSE(spec_error_of("train.batch_size = 0\n").empty());
    EXPECT_FALSE(spec_error_of("train.clip_gradients = yes\n").empty());
    EXPECT_FALSE(spec_error_of("period.test_year = 2017\n").empty());
    EXPECT_FALSE(spec_error_of("cnn.conv_channels = 8, 16\n").empty());
    EXPECT_FALSE(spec_error_of("mlp.hidden_widths = 4, 0\n").empty());
    EXPECT_FALSE(spec_error_of("train.epochs = 3\ntrain.epochs = 4\n").empty());
}

TEST(RunConfig, OversizedKernelNamesTheShapeChain) {
    const auto message = spec_error_of("cnn.kernel = 25\n");
    EXPECT_NE(message.find("conv1"), std::string::npos) << message;
}

TEST(RunConfig, RenderRoundTrips) {
    RunConfig config;
    config.cnn.conv_channels = {3, 5, 7};
    config.cnn.dense_widths = {};
    config.mlp.hidden_widths = {};
    config.train.learning_rate = 0.1 + 0.2;
    config.train.val_fraction = 1.0 / 3.0;
    config.train.clip_gradients = true;
    config.periods = {2010, 2012, 2013};
    const auto text = render_run_config(config);
    EXPECT_EQ(parse_run_config(text), config);
    EXPECT_EQ(render_run_config(parse_run_config(text)), text);
    EXPECT_EQ(parse_run_config(render_run_config(RunConfig{})), RunConfig{});
}

TEST(Checkpoint, RoundTripIsByteIdenticalAndBitExact) {
    for (const ModelSpec& spec : {ModelSpec{CnnSpec{}}, ModelSpec{MlpSpec{}}, ModelSpec{MlpSpec{{}}}}) {
        const auto ckpt = sample_checkpoint(spec, 21);
        const auto text = serialize_checkpoint(ckpt);
        const auto loaded = parse_checkpoint(text);
        ASSERT_EQ(serialize_checkpoint(loaded), text);
        const auto a = model_parameters(ckpt.model);
        const auto b = model_parameters(loaded.model);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            ASSERT_EQ(a[i]->shape(), b[i]->shape());
            for (std::size_t j = 0; j < a[i]->size(); ++j) {
                ASSERT_EQ(std::bit_cast<std::uint64_t>((*a[i])[j]), std::bit_cast<std::uint64_t>((*b[i])[j]));
            }
        }
        EXPECT_EQ(loaded.model.norm_stats.min, ckpt.model.norm_stats.min);
        EXPECT_EQ(loaded.model.norm_stats.max, ckpt.model.norm_stats.max);
        EXPECT_EQ(loaded.model.meta.season, Season::Winter);
        EXPECT_EQ(loaded.model.meta.seed, 21u);
        EXPECT_EQ(loaded.model.meta.spec, ckpt.model.meta.spec);
        EXPECT_EQ(loaded.best_epoch, 17u);
        EXPECT_EQ(loaded.best_val_loss, ckpt.best_val_loss);
    }
}

TEST(Checkpoint, LoadedModelPredictsIdentically) {
    const auto ckpt = sample_checkpoint(CnnSpec{}, 4);
    const auto loaded = parse_checkpoint(serialize_checkpoint(ckpt));
    Prng prng(8);
    for (int i = 0; i < 10; ++i) {
        Tensor x(Shape({kWindowLength}), 0.0);
        for (auto& v : x.data()) v = prng.next_uniform();
        EXPECT_EQ(model_forward(ckpt.model, x), model_forward(loaded.model, x));
    }
}

TEST(Checkpoint, FileRoundTrip) {
    const auto dir = temp_dir("file");
    const auto ckpt = sample_checkpoint(MlpSpec{}, 2);
    save_checkpoint(ckpt, dir / "a.ckpt");
    save_checkpoint(load_checkpoint(dir / "a.ckpt"), dir / "b.ckpt");
    std::ifstream a(dir / "a.ckpt"), b(dir / "b.ckpt");
    const std::string sa((std::istreambuf_iterator<char>(a)), {});
    const std::string sb((std::istreambuf_iterator<char>(b)), {});
    EXPECT_EQ(sa, sb);
    EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), CheckpointError);
    EXPECT_THROW(save_checkpoint(ckpt, dir / "no_such_dir" / "x.ckpt"), IoError);
    std::filesystem::remove_all(dir);
}

TEST(Checkpoint, CorruptionIsDetected) {
    const auto text = serialize_checkpoint(sample_checkpoint(CnnSpec{}, 6));
    const auto corrupt = [&](const std::string& from, const std::string& to) {
        auto copy = text;
        const auto pos = copy.find(from);
        EXPECT_NE(pos, std::string::npos) << from;
        copy.replace(pos, from.size(), to);
        return copy;
    };
    EXPECT_THROW(parse_checkpoint(""), CheckpointError);
    EXPECT_THROW(parse_checkpoint(text.substr(0, text.size() / 2)), CheckpointError);
    EXPECT_THROW(parse_checkpoint(corrupt("pricecast-checkpoint 1", "pricecast-checkpoint 2")), CheckpointError);
    EXPECT_THROW(parse_checkpoint(corrupt("cnn.kernel 3", "cnn.kernel 4")), CheckpointError);
    EXPECT_THROW(parse_checkpoint(corrupt("season winter", "season monsoon")), CheckpointError);
    EXPECT_THROW(parse_checkpoint(corrupt("\nend", "\nextra")), CheckpointError);
    EXPECT_THROW(parse_checkpoint(corrupt("weights 24 ", "weights 25 ")), CheckpointError);
    EXPECT_THROW(parse_checkpoint(text + "trailing\n"), CheckpointError);
    try {
        parse_checkpoint(corrupt("norm.max ", "norm.max x"));
        FAIL() << "expected CheckpointError";
    } catch (const CheckpointError& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}
