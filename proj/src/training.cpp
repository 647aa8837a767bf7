#include "pricecast/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "pricecast/errors.hpp"

namespace pricecast {

void validate(const TrainConfig& c) {
    if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
        throw SpecError("train.learning_rate must be > 0");
    }
    if (c.batch_size == 0) {
        throw SpecError("train.batch_size must be >= 1");
    }
    if (!(c.val_fraction > 0.0 && c.val_fraction < 1.0)) {
        throw SpecError("train.val_fraction must lie in (0, 1)");
    }
    if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) {
        throw SpecError("train.beta1 and train.beta2 must lie in [0, 1)");
    }
    if (!(c.epsilon > 0.0)) {
        throw SpecError("train.epsilon must be > 0");
    }
}

LossAndGrad mse_loss(double pred, double target) {
    const double diff = pred - target;
    return {diff * diff, 2.0 * diff};
}

AdamState AdamState::zeros_like(std::span<const Tensor* const> params) {
    AdamState state;
    for (const auto* p : params) {
        state.m.emplace_back(p->shape(), 0.0);
        state.v.emplace_back(p->shape(), 0.0);
    }
    return state;
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               const TrainConfig& config) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ShapeError("adam_step: parameter, gradient and state counts differ");
    }
    for (std::size_t n = 0; n < params.size(); ++n) {
        if (grads[n].shape() != params[n]->shape()) {
            throw ShapeError("adam_step: gradient " + std::to_string(n) + " shape mismatch");
        }
        if (!grads[n].all_finite()) {
            throw TrainingError("non-finite gradient in parameter tensor " + std::to_string(n) + " " +
                                params[n]->shape().to_string());
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);

    for (std::size_t n = 0; n < params.size(); ++n) {
        auto theta = params[n]->data();
        auto m = state.m[n].data();
        auto v = state.v[n].data();
        const auto g = grads[n].data();
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double gi = g[i];
            if (config.clip_gradients) {
                gi = std::clamp(gi, -kGradientClip, kGradientClip);
            }
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gi;
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gi * gi;
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
    }
}

double mean_loss(const Model& model, std::span<const WindowSample> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& s : samples) {
        total += mse_loss(model_forward(model, s.input), s.target).loss;
    }
    return total / static_cast<double>(samples.size());
}

namespace {

void accumulate(std::vector<Tensor>& into, const std::vector<Tensor>& grads) {
    for (std::size_t n = 0; n < into.size(); ++n) {
        auto dst = into[n].data();
        const auto src = grads[n].data();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] += src[i];
        }
    }
}

std::vector<Tensor> zero_grads(const Model& model) {
    std::vector<Tensor> grads;
    for (const auto* p : model_parameters(model)) {
        grads.emplace_back(p->shape(), 0.0);
    }
    return grads;
}

}  // namespace

TrainResult train(Model model, std::span<const WindowSample> samples, const TrainConfig& config) {
    validate(config);
    if (samples.empty()) {
        throw ArgumentError("train: empty training set");
    }
    TrainResult result{std::move(model), {}};
    if (config.epochs == 0) {
        return result;
    }
    Model& current = result.model;

    // Chronological hold-out. With too few samples to spare one, the
    // training set doubles as the validation set.
    const auto n_total = samples.size();
    auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n_total) * config.val_fraction));
    n_val = std::min(n_val, n_total - 1);
    const auto fit_set = samples.first(n_total - n_val);
    const auto val_set = n_val > 0 ? samples.last(n_val) : fit_set;

    Prng prng(config.seed);
    std::vector<std::size_t> order(fit_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto params = model_parameters(current);
    AdamState adam = AdamState::zeros_like(std::vector<const Tensor*>(params.begin(), params.end()));

    Model best = current;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        // Fisher-Yates with the seeded stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[prng.next_below(i)]);
        }

        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(begin + config.batch_size, order.size());
            auto batch_grads = zero_grads(current);
            double batch_loss = 0.0;
            for (std::size_t k = begin; k < end; ++k) {
                const auto& sample = fit_set[order[k]];
                const auto trace = model_forward_trace(current, sample.input);
                const auto lg = mse_loss(trace.output, sample.target);
                batch_loss += lg.loss;
                accumulate(batch_grads, model_backward(current, trace, lg.dloss_dpred));
            }
            if (!std::isfinite(batch_loss)) {
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_index));
            }
            const double scale = 1.0 / static_cast<double>(end - begin);
            for (auto& g : batch_grads) {
                for (auto& x : g.data()) {
                    x *= scale;
                }
            }
            adam_step(params, batch_grads, adam, config);
            epoch_loss += batch_loss;
        }

        const double train_loss = epoch_loss / static_cast<double>(order.size());
        const double val_loss = mean_loss(current, val_set);
        if (!std::isfinite(val_loss)) {
            throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch));
        }
        result.history.train_loss.push_back(train_loss);
        result.history.val_loss.push_back(val_loss);

        if (val_loss < best_val) {
            best_val = val_loss;
            best = current;
            result.history.best_epoch = epoch;
            result.history.best_val_loss = val_loss;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }

    result.model = std::move(best);
    return result;
}

double grad_check(const Model& model, const WindowSample& sample, double epsilon) {
    if (model_param_count(model) == 0) {
        return 0.0;
    }
    const auto trace = model_forward_trace(model, sample.input);
    const auto analytic = model_backward(model, trace, mse_loss(trace.output, sample.target).dloss_dpred);

    Model probe = model;
    auto params = model_parameters(probe);
    const auto loss_at = [&] { return mse_loss(model_forward(probe, sample.input), sample.target).loss; };

    double worst = 0.0;
    for (std::size_t n = 0; n < params.size(); ++n) {
        auto values = params[n]->data();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + epsilon;
            const double up = loss_at();
            values[i] = saved - epsilon;
            const double down = loss_at();
            values[i] = saved;

            const double numeric = (up - down) / (2.0 * epsilon);
            const double a = analytic[n][i];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            worst = std::max(worst, std::abs(a - numeric) / denom);
        }
    }
    return worst;
}

std::string history_csv(const TrainHistory& history) {
    std::string out = "epoch,train_loss,val_loss\n";
    char buf[96];
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu,%.6g,%.6g\n", e + 1, history.train_loss[e], history.val_loss[e]);
        out += buf;
    }
    return out;
}

}  // namespace pricecast
