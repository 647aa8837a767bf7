#include "pricecast/layers.hpp"

#include <stdexcept>
#include <string>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
    if (t.shape().rank() != rank) {
        throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got shape " +
                         t.shape().to_string());
    }
}

std::size_t window_count(std::size_t length, std::size_t window, std::size_t stride, const char* what) {
    if (length < window) {
        throw ShapeError(std::string(what) + ": input length " + std::to_string(length) +
                         " is shorter than window " + std::to_string(window));
    }
    return (length - window) / stride + 1;
}

}  // namespace

std::size_t Conv1d::output_length(std::size_t input_length) const {
    return window_count(input_length, kernel(), stride, "conv1d");
}

std::size_t MaxPool1d::output_length(std::size_t input_length) const {
    return window_count(input_length, width, stride, "maxpool1d");
}

void validate(const Conv1d& layer) {
    require_rank(layer.weights, 3, "conv1d weights");
    require_rank(layer.bias, 1, "conv1d bias");
    if (layer.bias.size() != layer.out_channels()) {
        throw ShapeError("conv1d bias length must equal out_channels");
    }
    if (layer.stride == 0) {
        throw ShapeError("conv1d stride must be >= 1");
    }
}

void validate(const MaxPool1d& layer) {
    if (layer.width == 0 || layer.stride == 0) {
        throw ShapeError("maxpool1d width and stride must be >= 1");
    }
}

void validate(const Dense& layer) {
    require_rank(layer.weights, 2, "dense weights");
    require_rank(layer.bias, 1, "dense bias");
    if (layer.bias.size() != layer.out_dim()) {
        throw ShapeError("dense bias length must equal out_dim");
    }
}

Tensor conv1d_forward(const Conv1d& layer, const Tensor& input) {
    require_rank(input, 2, "conv1d input");
    if (input.shape()[0] != layer.in_channels()) {
        throw ShapeError("conv1d: input has " + std::to_string(input.shape()[0]) + " channels, layer expects " +
                         std::to_string(layer.in_channels()));
    }
    const std::size_t length = input.shape()[1];
    const std::size_t out_len = layer.output_length(length);
    const std::size_t k = layer.kernel();

    const std::size_t in_ch = layer.in_channels();
    const std::size_t stride = layer.stride;

    Tensor out(Shape{layer.out_channels(), out_len}, 0.0);
    const double* x = input.data().data();
    const double* w = layer.weights.data().data();
    double* y = out.data().data();
    for (std::size_t c = 0; c < layer.out_channels(); ++c) {
        double* yc = y + c * out_len;
        for (std::size_t t = 0; t < out_len; ++t) {
            yc[t] = layer.bias[c];
        }
        for (std::size_t i = 0; i < in_ch; ++i) {
            const double* xi = x + i * length;
            const double* wci = w + (c * in_ch + i) * k;
            for (std::size_t j = 0; j < k; ++j) {
                const double wv = wci[j];
                for (std::size_t t = 0; t < out_len; ++t) {
                    yc[t] += wv * xi[t * stride + j];
                }
            }
        }
    }
    return out;
}

LayerGrads conv1d_backward(const Conv1d& layer, const Tensor& input, const Tensor& grad_out) {
    require_rank(input, 2, "conv1d input");
    require_rank(grad_out, 2, "conv1d grad_out");
    const std::size_t out_len = layer.output_length(input.shape()[1]);
    if (input.shape()[0] != layer.in_channels() || grad_out.shape()[0] != layer.out_channels() ||
        grad_out.shape()[1] != out_len) {
        throw ShapeError("conv1d_backward: grad_out shape " + grad_out.shape().to_string() +
                         " does not match forward output");
    }
    const std::size_t k = layer.kernel();
    const std::size_t in_ch = layer.in_channels();
    const std::size_t length = input.shape()[1];
    const std::size_t stride = layer.stride;

    LayerGrads grads{Tensor(input.shape(), 0.0), Tensor(layer.weights.shape(), 0.0),
                     Tensor(layer.bias.shape(), 0.0)};
    const double* x = input.data().data();
    const double* w = layer.weights.data().data();
    const double* go = grad_out.data().data();
    double* gx = grads.grad_input.data().data();
    double* gw = grads.grad_weights->data().data();
    double* gb = grads.grad_bias->data().data();
    for (std::size_t c = 0; c < layer.out_channels(); ++c) {
        const double* goc = go + c * out_len;
        for (std::size_t t = 0; t < out_len; ++t) {
            gb[c] += goc[t];
        }
        for (std::size_t i = 0; i < in_ch; ++i) {
            const double* xi = x + i * length;
            double* gxi = gx + i * length;
            const std::size_t wbase = (c * in_ch + i) * k;
            for (std::size_t j = 0; j < k; ++j) {
                const double wv = w[wbase + j];
                double acc = 0.0;
                for (std::size_t t = 0; t < out_len; ++t) {
                    acc += goc[t] * xi[t * stride + j];
                    gxi[t * stride + j] += goc[t] * wv;
                }
                gw[wbase + j] += acc;
            }
        }
    }
    return grads;
}

PoolResult maxpool1d_forward(const MaxPool1d& layer, const Tensor& input) {
    require_rank(input, 2, "maxpool1d input");
    const std::size_t channels = input.shape()[0];
    const std::size_t out_len = layer.output_length(input.shape()[1]);

    PoolResult result{Tensor(Shape{channels, out_len}, 0.0), std::vector<std::size_t>(channels * out_len)};
    for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t t = 0; t < out_len; ++t) {
            const std::size_t start = t * layer.stride;
            std::size_t best = start;
            for (std::size_t j = start + 1; j < start + layer.width; ++j) {
                if (input.at(c, j) > input.at(c, best)) {
                    best = j;
                }
            }
            result.output.at(c, t) = input.at(c, best);
            result.argmax[c * out_len + t] = best;
        }
    }
    return result;
}

Tensor maxpool1d_backward(const std::vector<std::size_t>& argmax, const Tensor& grad_out, const Shape& input_shape) {
    if (grad_out.shape().rank() != 2 || input_shape.rank() != 2 || grad_out.shape()[0] != input_shape[0]) {
        throw ShapeError("maxpool1d_backward: incompatible grad_out " + grad_out.shape().to_string() +
                         " for input " + input_shape.to_string());
    }
    if (argmax.size() != grad_out.size()) {
        throw std::logic_error("maxpool1d_backward: argmax count does not match grad_out");
    }
    const std::size_t out_len = grad_out.shape()[1];
    Tensor grad_in(input_shape, 0.0);
    for (std::size_t n = 0; n < argmax.size(); ++n) {
        if (argmax[n] >= input_shape[1]) {
            throw std::logic_error("maxpool1d_backward: argmax index out of range");
        }
        grad_in.at(n / out_len, argmax[n]) += grad_out[n];
    }
    return grad_in;
}

Tensor relu_forward(const Tensor& input) {
    Tensor out = input;
    for (auto& v : out.data()) {
        v = v > 0.0 ? v : 0.0;
    }
    return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
    if (input.shape() != grad_out.shape()) {
        throw ShapeError("relu_backward: shape mismatch " + input.shape().to_string() + " vs " +
                         grad_out.shape().to_string());
    }
    Tensor grad_in(input.shape(), 0.0);
    for (std::size_t i = 0; i < input.size(); ++i) {
        grad_in[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
    }
    return grad_in;
}

Tensor dense_forward(const Dense& layer, const Tensor& input) {
    require_rank(input, 1, "dense input");
    if (input.size() != layer.in_dim()) {
        throw ShapeError("dense: input length " + std::to_string(input.size()) + ", layer expects " +
                         std::to_string(layer.in_dim()));
    }
    const std::size_t in_dim = layer.in_dim();
    const double* w = layer.weights.data().data();
    const double* x = input.data().data();
    Tensor out(Shape{layer.out_dim()}, 0.0);
    for (std::size_t o = 0; o < layer.out_dim(); ++o) {
        const double* row = w + o * in_dim;
        double acc = layer.bias[o];
        for (std::size_t i = 0; i < in_dim; ++i) {
            acc += row[i] * x[i];
        }
        out[o] = acc;
    }
    return out;
}

LayerGrads dense_backward(const Dense& layer, const Tensor& input, const Tensor& grad_out) {
    require_rank(input, 1, "dense input");
    require_rank(grad_out, 1, "dense grad_out");
    if (input.size() != layer.in_dim() || grad_out.size() != layer.out_dim()) {
        throw ShapeError("dense_backward: shapes inconsistent with layer");
    }
    LayerGrads grads{Tensor(input.shape(), 0.0), Tensor(layer.weights.shape(), 0.0), grad_out};
    const std::size_t in_dim = layer.in_dim();
    const double* w = layer.weights.data().data();
    const double* x = input.data().data();
    double* gw = grads.grad_weights->data().data();
    double* gx = grads.grad_input.data().data();
    for (std::size_t o = 0; o < layer.out_dim(); ++o) {
        const double g = grad_out[o];
        const double* row = w + o * in_dim;
        double* grow = gw + o * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) {
            grow[i] = g * x[i];
            gx[i] += row[i] * g;
        }
    }
    return grads;
}

Tensor flatten(const Tensor& input) {
    require_rank(input, 2, "flatten input");
    return input.reshaped(Shape{input.size()});
}

Tensor unflatten(const Tensor& grad, const Shape& input_shape) { return grad.reshaped(input_shape); }

}  // namespace pricecast
