#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pricecast/calendar.hpp"
#include "pricecast/layers.hpp"
#include "pricecast/norm_stats.hpp"
#include "pricecast/tensor.hpp"

namespace pricecast {

inline constexpr std::size_t kWindowLength = 23;

// Defaults make the three conv+pool stages consume a 23-hour window down to
// length 1 (23 -> 21 -> 10 -> 8 -> 4 -> 2 -> 1).
struct CnnSpec {
    std::vector<std::size_t> conv_channels{8, 16, 32};
    std::size_t kernel = 3;
    std::size_t pool_width = 2;
    std::vector<std::size_t> dense_widths{16};
    std::size_t input_len = kWindowLength;

    friend bool operator==(const CnnSpec&, const CnnSpec&) = default;
};

struct MlpSpec {
    std::vector<std::size_t> hidden_widths{64, 32};
    std::size_t input_len = kWindowLength;

    friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

using ModelSpec = std::variant<std::monostate, CnnSpec, MlpSpec>;

struct Relu {};
struct Flatten {};

using Layer = std::variant<Conv1d, Relu, MaxPool1d, Flatten, Dense>;

struct ModelMeta {
    ModelSpec spec;
    std::optional<Season> season;
    std::uint64_t seed = 0;
};

/// Ordered layer stack mapping a normalized window to one scalar.
struct Model {
    std::vector<Layer> layers;
    std::size_t input_len = kWindowLength;
    NormStats norm_stats;
    ModelMeta meta;
};

/// Lengths after every conv and pool stage, starting with the input length.
/// Throws SpecError naming the stage where the chain breaks.
std::vector<std::size_t> cnn_length_chain(const CnnSpec& spec);

/// conv -> relu -> pool (x3), flatten, dense -> relu per dense width, dense -> 1.
/// He-initialized weights, zero biases.
Model build_paper_cnn(const CnnSpec& spec, Prng& prng);

/// dense -> relu per hidden width, then dense -> 1. Empty widths give an affine model.
Model build_bp_mlp(const MlpSpec& spec, Prng& prng);

/// Scalar prediction in normalized space.
double model_forward(const Model& model, const Tensor& window);

std::size_t model_param_count(const Model& model);

/// Parameter tensors in layer order: weights then bias for each conv/dense layer.
std::vector<Tensor*> model_parameters(Model& model);
std::vector<const Tensor*> model_parameters(const Model& model);

/// Per-layer inputs recorded during a forward pass, reused by backward.
struct ForwardTrace {
    std::vector<Tensor> layer_inputs;
    std::vector<std::vector<std::size_t>> argmax;  // indexed by layer; empty unless maxpool
    double output = 0.0;
};

ForwardTrace model_forward_trace(const Model& model, const Tensor& window);

/// Gradients aligned with model_parameters(), for d(loss)/d(output) = upstream.
std::vector<Tensor> model_backward(const Model& model, const ForwardTrace& trace, double upstream);

/// Throws ShapeError if layers do not compose from input_len to one scalar.
void validate_model(const Model& model);

std::string architecture_name(const ModelSpec& spec);

}  // namespace pricecast
