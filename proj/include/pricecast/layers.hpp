#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pricecast/tensor.hpp"

namespace pricecast {

/// Valid (unpadded) 1D convolution. weights [out_ch, in_ch, k], bias [out_ch].
struct Conv1d {
    Tensor weights;
    Tensor bias;
    std::size_t stride = 1;

    std::size_t out_channels() const { return weights.shape()[0]; }
    std::size_t in_channels() const { return weights.shape()[1]; }
    std::size_t kernel() const { return weights.shape()[2]; }
    std::size_t output_length(std::size_t input_length) const;
};

struct MaxPool1d {
    std::size_t width = 2;
    std::size_t stride = 2;

    std::size_t output_length(std::size_t input_length) const;
};

/// Fully connected layer. weights [out_dim, in_dim], bias [out_dim].
struct Dense {
    Tensor weights;
    Tensor bias;

    std::size_t out_dim() const { return weights.shape()[0]; }
    std::size_t in_dim() const { return weights.shape()[1]; }
};

struct LayerGrads {
    Tensor grad_input;
    std::optional<Tensor> grad_weights;
    std::optional<Tensor> grad_bias;
};

struct PoolResult {
    Tensor output;
    /// For each output element (row-major [C, L_out]), the position within
    /// its channel of the first maximum in the window.
    std::vector<std::size_t> argmax;
};

/// Throws ShapeError unless the layer's own tensors are consistent and stride >= 1.
void validate(const Conv1d& layer);
void validate(const MaxPool1d& layer);
void validate(const Dense& layer);

Tensor conv1d_forward(const Conv1d& layer, const Tensor& input);
LayerGrads conv1d_backward(const Conv1d& layer, const Tensor& input, const Tensor& grad_out);

PoolResult maxpool1d_forward(const MaxPool1d& layer, const Tensor& input);
Tensor maxpool1d_backward(const std::vector<std::size_t>& argmax, const Tensor& grad_out,
                          const Shape& input_shape);

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

Tensor dense_forward(const Dense& layer, const Tensor& input);
LayerGrads dense_backward(const Dense& layer, const Tensor& input, const Tensor& grad_out);

/// [C, L] -> [C*L], row-major.
Tensor flatten(const Tensor& input);
/// Inverse of flatten for the recorded input shape.
Tensor unflatten(const Tensor& grad, const Shape& input_shape);

}  // namespace pricecast
