#include "pricecast/model.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Dense make_dense(Prng& prng, std::size_t in_dim, std::size_t out_dim) {
    return Dense{he_init(prng, Shape{out_dim, in_dim}, in_dim), Tensor(Shape{out_dim}, 0.0)};
}

Tensor as_model_input(const Model& model, const Tensor& window) {
    if (window.shape().rank() != 1 || window.size() != model.input_len) {
        throw ShapeError("model input must be a length-" + std::to_string(model.input_len) + " vector, got " +
                         window.shape().to_string());
    }
    if (!model.layers.empty() && std::holds_alternative<Conv1d>(model.layers.front())) {
        return window.reshaped(Shape{1, window.size()});
    }
    return window;
}

double scalar_output(const Tensor& out) {
    if (out.size() != 1) {
        throw ShapeError("model output must be a single scalar, got " + out.shape().to_string());
    }
    return out[0];
}

}  // namespace

std::vector<std::size_t> cnn_length_chain(const CnnSpec& spec) {
    if (spec.conv_channels.size() != 3) {
        throw SpecError("cnn spec needs exactly three conv channel counts");
    }
    if (spec.kernel == 0 || spec.pool_width == 0 || spec.input_len == 0) {
        throw SpecError("cnn kernel, pool width and input length must be >= 1");
    }
    std::vector<std::size_t> chain{spec.input_len};
    std::size_t length = spec.input_len;
    for (std::size_t stage = 0; stage < 3; ++stage) {
        const auto name = std::to_string(stage + 1);
        if (spec.conv_channels[stage] == 0) {
            throw SpecError("conv" + name + ": channel count must be >= 1");
        }
        if (length < spec.kernel) {
            throw SpecError("conv" + name + ": input length " + std::to_string(length) + " < kernel " +
                            std::to_string(spec.kernel));
        }
        length = length - spec.kernel + 1;
        chain.push_back(length);
        if (length < spec.pool_width) {
            throw SpecError("pool" + name + ": input length " + std::to_string(length) + " < pool width " +
                            std::to_string(spec.pool_width));
        }
        length = (length - spec.pool_width) / spec.pool_width + 1;
        chain.push_back(length);
    }
    return chain;
}

Model build_paper_cnn(const CnnSpec& spec, Prng& prng) {
    const auto chain = cnn_length_chain(spec);
    for (auto w : spec.dense_widths) {
        if (w == 0) {
            throw SpecError("cnn dense widths must be >= 1");
        }
    }

    Model model;
    model.input_len = spec.input_len;
    model.meta.spec = spec;
    model.meta.seed = prng.state();

    std::size_t in_ch = 1;
    for (auto out_ch : spec.conv_channels) {
        const std::size_t fan_in = in_ch * spec.kernel;
        model.layers.emplace_back(Conv1d{he_init(prng, Shape{out_ch, in_ch, spec.kernel}, fan_in),
                                         Tensor(Shape{out_ch}, 0.0), 1});
        model.layers.emplace_back(Relu{});
        model.layers.emplace_back(MaxPool1d{spec.pool_width, spec.pool_width});
        in_ch = out_ch;
    }
    model.layers.emplace_back(Flatten{});

    std::size_t width = in_ch * chain.back();
    for (auto w : spec.dense_widths) {
        model.layers.emplace_back(make_dense(prng, width, w));
        model.layers.emplace_back(Relu{});
        width = w;
    }
    model.layers.emplace_back(make_dense(prng, width, 1));
    return model;
}

Model build_bp_mlp(const MlpSpec& spec, Prng& prng) {
    if (spec.input_len == 0) {
        throw SpecError("mlp input length must be >= 1");
    }
    for (auto w : spec.hidden_widths) {
        if (w == 0) {
            throw SpecError("mlp hidden widths must be >= 1");
        }
    }

    Model model;
    model.input_len = spec.input_len;
    model.meta.spec = spec;
    model.meta.seed = prng.state();

    std::size_t width = spec.input_len;
    for (auto w : spec.hidden_widths) {
        model.layers.emplace_back(make_dense(prng, width, w));
        model.layers.emplace_back(Relu{});
        width = w;
    }
    model.layers.emplace_back(make_dense(prng, width, 1));
    return model;
}

ForwardTrace model_forward_trace(const Model& model, const Tensor& window) {
    ForwardTrace trace;
    trace.layer_inputs.reserve(model.layers.size());
    trace.argmax.resize(model.layers.size());

    Tensor x = as_model_input(model, window);
    for (std::size_t n = 0; n < model.layers.size(); ++n) {
        Tensor next = std::visit(Overloaded{
                                     [&](const Conv1d& l) { return conv1d_forward(l, x); },
                                     [&](const Relu&) { return relu_forward(x); },
                                     [&](const MaxPool1d& l) {
                                         auto pooled = maxpool1d_forward(l, x);
                                         trace.argmax[n] = std::move(pooled.argmax);
                                         return std::move(pooled.output);
                                     },
                                     [&](const Flatten&) { return flatten(x); },
                                     [&](const Dense& l) { return dense_forward(l, x); },
                                 },
                                 model.layers[n]);
        trace.layer_inputs.push_back(std::move(x));
        x = std::move(next);
    }
    trace.output = scalar_output(x);
    return trace;
}

double model_forward(const Model& model, const Tensor& window) {
    Tensor x = as_model_input(model, window);
    for (const auto& layer : model.layers) {
        x = std::visit(Overloaded{
                           [&](const Conv1d& l) { return conv1d_forward(l, x); },
                           [&](const Relu&) { return relu_forward(x); },
                           [&](const MaxPool1d& l) { return maxpool1d_forward(l, x).output; },
                           [&](const Flatten&) { return flatten(x); },
                           [&](const Dense& l) { return dense_forward(l, x); },
                       },
                       layer);
    }
    return scalar_output(x);
}

std::vector<Tensor> model_backward(const Model& model, const ForwardTrace& trace, double upstream) {
    if (trace.layer_inputs.size() != model.layers.size()) {
        throw ShapeError("forward trace does not belong to this model");
    }
    // Collected back-to-front, then reversed into parameter order.
    std::vector<Tensor> reversed;
    Tensor grad(Shape{1}, upstream);
    for (std::size_t n = model.layers.size(); n-- > 0;) {
        const Tensor& input = trace.layer_inputs[n];
        grad = std::visit(Overloaded{
                              [&](const Conv1d& l) {
                                  auto g = conv1d_backward(l, input, grad);
                                  reversed.push_back(std::move(*g.grad_bias));
                                  reversed.push_back(std::move(*g.grad_weights));
                                  return std::move(g.grad_input);
                              },
                              [&](const Relu&) { return relu_backward(input, grad); },
                              [&](const MaxPool1d&) {
                                  return maxpool1d_backward(trace.argmax[n], grad, input.shape());
                              },
                              [&](const Flatten&) { return unflatten(grad, input.shape()); },
                              [&](const Dense& l) {
                                  auto g = dense_backward(l, input, grad);
                                  reversed.push_back(std::move(*g.grad_bias));
                                  reversed.push_back(std::move(*g.grad_weights));
                                  return std::move(g.grad_input);
                              },
                          },
                          model.layers[n]);
    }
    return {std::make_move_iterator(reversed.rbegin()), std::make_move_iterator(reversed.rend())};
}

std::vector<Tensor*> model_parameters(Model& model) {
    std::vector<Tensor*> params;
    for (auto& layer : model.layers) {
        if (auto* conv = std::get_if<Conv1d>(&layer)) {
            params.push_back(&conv->weights);
            params.push_back(&conv->bias);
        } else if (auto* dense = std::get_if<Dense>(&layer)) {
            params.push_back(&dense->weights);
            params.push_back(&dense->bias);
        }
    }
    return params;
}

std::vector<const Tensor*> model_parameters(const Model& model) {
    auto params = model_parameters(const_cast<Model&>(model));
    return {params.begin(), params.end()};
}

std::size_t model_param_count(const Model& model) {
    std::size_t count = 0;
    for (const auto* p : model_parameters(model)) {
        count += p->size();
    }
    return count;
}

void validate_model(const Model& model) {
    for (const auto& layer : model.layers) {
        std::visit(Overloaded{
                       [](const Conv1d& l) { validate(l); },
                       [](const MaxPool1d& l) { validate(l); },
                       [](const Dense& l) { validate(l); },
                       [](const auto&) {},
                   },
                   layer);
    }
    for (const auto* p : model_parameters(model)) {
        if (!p->all_finite()) {
            throw ShapeError("model has non-finite parameters");
        }
    }
    // A zero-filled probe exercises every shape check along the stack.
    model_forward(model, Tensor(Shape{model.input_len}, 0.0));
}

std::string architecture_name(const ModelSpec& spec) {
    return std::visit(Overloaded{
                          [](const std::monostate&) { return std::string("custom"); },
                          [](const CnnSpec&) { return std::string("cnn"); },
                          [](const MlpSpec&) { return std::string("bp"); },
                      },
                      spec);
}

}  // namespace pricecast
