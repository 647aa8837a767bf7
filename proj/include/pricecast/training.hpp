#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pricecast/data.hpp"
#include "pricecast/model.hpp"

namespace pricecast {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 42;
    std::size_t patience = 20;
    double val_fraction = 0.1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Clip every gradient component to [-5, 5] before the Adam update.
    bool clip_gradients = false;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline constexpr double kGradientClip = 5.0;

/// Throws SpecError on out-of-range fields.
void validate(const TrainConfig& config);

struct LossAndGrad {
    double loss = 0.0;
    double dloss_dpred = 0.0;
};

/// Squared error and its derivative with respect to the prediction.
LossAndGrad mse_loss(double pred, double target);

struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::size_t step = 0;

    /// Zero moments shaped like `params`.
    static AdamState zeros_like(std::span<const Tensor* const> params);
};

/// One bias-corrected Adam update, in place. Throws TrainingError naming the
/// parameter tensor if a gradient is non-finite.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               const TrainConfig& config);

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    /// 1-based epoch whose parameters were kept; 0 when no epoch ran.
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
};

struct TrainResult {
    Model model;
    TrainHistory history;
};

/// Mini-batch Adam on MSE. The chronologically last val_fraction of
/// `samples` is held out for early stopping; the best-validation parameters
/// are returned. Deterministic in (model, samples, config).
TrainResult train(Model model, std::span<const WindowSample> samples, const TrainConfig& config);

/// Mean squared error of the model over `samples` in normalized space.
double mean_loss(const Model& model, std::span<const WindowSample> samples);

/// Max relative error between backprop and central-difference gradients of
/// the squared-error loss over every parameter scalar.
double grad_check(const Model& model, const WindowSample& sample, double epsilon);

/// `epoch,train_loss,val_loss` with 6 significant digits.
std::string history_csv(const TrainHistory& history);

}  // namespace pricecast
