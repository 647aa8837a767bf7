#include "pricecast/gradcheck.hpp"

#include <string>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

std::size_t uniform_int(Prng& prng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(prng.next_below(hi - lo + 1));
}

CnnSpec random_cnn_spec(Prng& prng) {
    while (true) {
        CnnSpec spec;
        spec.conv_channels = {uniform_int(prng, 1, 6), uniform_int(prng, 1, 6), uniform_int(prng, 1, 6)};
        spec.kernel = uniform_int(prng, 1, 4);
        spec.pool_width = uniform_int(prng, 2, 3);
        spec.dense_widths.resize(uniform_int(prng, 0, 2));
        for (auto& w : spec.dense_widths) {
            w = uniform_int(prng, 1, 12);
        }
        try {
            (void)cnn_length_chain(spec);
            return spec;
        } catch (const SpecError&) {
            // redraw
        }
    }
}

MlpSpec random_mlp_spec(Prng& prng) {
    MlpSpec spec;
    spec.hidden_widths.resize(uniform_int(prng, 0, 3));
    for (auto& w : spec.hidden_widths) {
        w = uniform_int(prng, 1, 32);
    }
    return spec;
}

}  // namespace

Architecture parse_architecture(std::string_view name) {
    if (name == "cnn") {
        return Architecture::Cnn;
    }
    if (name == "bp") {
        return Architecture::Bp;
    }
    throw ArgumentError("unknown model '" + std::string(name) + "' (expected cnn or bp)");
}

GradCheckCase make_gradcheck_case(Architecture arch, std::uint64_t seed) {
    Prng prng(seed);
    GradCheckCase c;
    c.model = arch == Architecture::Cnn ? build_paper_cnn(random_cnn_spec(prng), prng)
                                        : build_bp_mlp(random_mlp_spec(prng), prng);
    for (auto* p : model_parameters(c.model)) {
        if (p->shape().rank() == 1) {
            for (auto& b : p->data()) {
                b = 0.1 * prng.next_gaussian();
            }
        }
    }
    c.sample.input = Tensor(Shape{c.model.input_len}, 0.0);
    for (auto& x : c.sample.input.data()) {
        x = prng.next_uniform();
    }
    c.sample.target = prng.next_uniform();
    return c;
}

}  // namespace pricecast
