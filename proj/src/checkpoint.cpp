#include "pricecast/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

constexpr std::string_view kMagic = "pricecast-checkpoint";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_values(std::string& out, std::string_view tag, const Tensor& t) {
    out += tag;
    out += ' ';
    out += std::to_string(t.size());
    for (double v : t.data()) {
        out += ' ';
        out += fmt17(v);
    }
    out += '\n';
}

std::string list(const std::vector<std::size_t>& values) {
    std::string out;
    for (auto v : values) {
        out += ' ' + std::to_string(v);
    }
    return out;
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    /// Next non-empty line split on spaces.
    std::vector<std::string_view> tokens() {
        while (pos_ < text_.size()) {
            auto end = text_.find('\n', pos_);
            if (end == std::string_view::npos) {
                end = text_.size();
            }
            auto line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_no_;
            std::vector<std::string_view> out;
            std::size_t i = 0;
            while (i < line.size()) {
                const auto j = line.find(' ', i);
                const auto tok = line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
                if (!tok.empty()) {
                    out.push_back(tok);
                }
                if (j == std::string_view::npos) {
                    break;
                }
                i = j + 1;
            }
            if (!out.empty()) {
                return out;
            }
        }
        fail("unexpected end of checkpoint");
    }

    /// True when only blank lines remain.
    bool at_end() const {
        return pos_ >= text_.size() || text_.find_first_not_of(" \n", pos_) == std::string_view::npos;
    }

    /// Tokens after a required leading key.
    std::vector<std::string_view> field(std::string_view key) {
        auto toks = tokens();
        if (toks.front() != key) {
            fail("expected '" + std::string(key) + "', found '" + std::string(toks.front()) + "'");
        }
        toks.erase(toks.begin());
        return toks;
    }

    std::string_view single(std::string_view key) {
        const auto toks = field(key);
        if (toks.size() != 1) {
            fail("'" + std::string(key) + "' takes exactly one value");
        }
        return toks.front();
    }

    template <class T>
    T number(std::string_view tok) {
        T value{};
        if constexpr (std::is_floating_point_v<T>) {
            // strtod handles every form %.17g can emit, including inf/nan spellings we then reject.
            const std::string s(tok);
            char* end = nullptr;
            value = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(value)) {
                fail("bad number '" + s + "'");
            }
        } else {
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
                fail("bad integer '" + std::string(tok) + "'");
            }
        }
        return value;
    }

    std::vector<std::size_t> sizes(std::span<const std::string_view> toks) {
        std::vector<std::size_t> out;
        for (auto t : toks) {
            out.push_back(number<std::size_t>(t));
        }
        return out;
    }

    Tensor values(std::string_view key, const Shape& shape) {
        const auto toks = field(key);
        if (toks.empty() || number<std::size_t>(toks.front()) != shape.size() || toks.size() != shape.size() + 1) {
            fail("'" + std::string(key) + "' does not hold " + std::to_string(shape.size()) + " values");
        }
        std::vector<double> data;
        data.reserve(shape.size());
        for (std::size_t i = 1; i < toks.size(); ++i) {
            data.push_back(number<double>(toks[i]));
        }
        return Tensor(shape, std::move(data));
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw CheckpointError("checkpoint line " + std::to_string(line_no_) + ": " + what);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

Shape positive_shape(Reader& r, std::vector<std::size_t> dims) {
    for (auto d : dims) {
        if (d == 0) {
            r.fail("layer dimensions must be positive");
        }
    }
    return Shape(std::move(dims));
}

/// Same layer kinds and parameter shapes as a freshly built model of `spec`.
void check_against_spec(const Model& model) {
    Prng scratch(0);
    Model reference;
    if (const auto* cnn = std::get_if<CnnSpec>(&model.meta.spec)) {
        reference = build_paper_cnn(*cnn, scratch);
    } else if (const auto* mlp = std::get_if<MlpSpec>(&model.meta.spec)) {
        reference = build_bp_mlp(*mlp, scratch);
    } else {
        return;
    }
    if (reference.layers.size() != model.layers.size() || reference.input_len != model.input_len) {
        throw CheckpointError("checkpoint layers do not match its spec");
    }
    for (std::size_t n = 0; n < model.layers.size(); ++n) {
        if (reference.layers[n].index() != model.layers[n].index()) {
            throw CheckpointError("checkpoint layer " + std::to_string(n) + " does not match its spec");
        }
    }
    const auto expected = model_parameters(reference);
    const auto actual = model_parameters(model);
    for (std::size_t n = 0; n < expected.size(); ++n) {
        if (expected[n]->shape() != actual[n]->shape()) {
            throw CheckpointError("checkpoint parameter " + std::to_string(n) + " has shape " +
                                  actual[n]->shape().to_string() + ", spec implies " +
                                  expected[n]->shape().to_string());
        }
    }
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
    const Model& m = ck.model;
    std::string out;
    out += std::string(kMagic) + " " + std::to_string(kCheckpointVersion) + "\n";
    out += "architecture " + architecture_name(m.meta.spec) + "\n";
    out += "season " + std::string(m.meta.season ? season_name(*m.meta.season) : "none") + "\n";
    out += "seed " + std::to_string(m.meta.seed) + "\n";
    out += "input_len " + std::to_string(m.input_len) + "\n";
    if (const auto* cnn = std::get_if<CnnSpec>(&m.meta.spec)) {
        out += "cnn.conv_channels" + list(cnn->conv_channels) + "\n";
        out += "cnn.kernel " + std::to_string(cnn->kernel) + "\n";
        out += "cnn.pool_width " + std::to_string(cnn->pool_width) + "\n";
        out += "cnn.dense_widths" + list(cnn->dense_widths) + "\n";
    } else if (const auto* mlp = std::get_if<MlpSpec>(&m.meta.spec)) {
        out += "mlp.hidden_widths" + list(mlp->hidden_widths) + "\n";
    }
    out += "period.train_first_year " + std::to_string(ck.periods.train_first_year) + "\n";
    out += "period.train_last_year " + std::to_string(ck.periods.train_last_year) + "\n";
    out += "period.test_year " + std::to_string(ck.periods.test_year) + "\n";
    out += "norm.min " + fmt17(m.norm_stats.min) + "\n";
    out += "norm.max " + fmt17(m.norm_stats.max) + "\n";
    out += "best_epoch " + std::to_string(ck.best_epoch) + "\n";
    out += "best_val_loss " + fmt17(ck.best_val_loss) + "\n";
    out += "layers " + std::to_string(m.layers.size()) + "\n";
    for (const auto& layer : m.layers) {
        if (const auto* conv = std::get_if<Conv1d>(&layer)) {
            out += "conv1d " + std::to_string(conv->out_channels()) + " " + std::to_string(conv->in_channels()) +
                   " " + std::to_string(conv->kernel()) + " " + std::to_string(conv->stride) + "\n";
            write_values(out, "weights", conv->weights);
            write_values(out, "bias", conv->bias);
        } else if (const auto* pool = std::get_if<MaxPool1d>(&layer)) {
            out += "maxpool1d " + std::to_string(pool->width) + " " + std::to_string(pool->stride) + "\n";
        } else if (const auto* dense = std::get_if<Dense>(&layer)) {
            out += "dense " + std::to_string(dense->out_dim()) + " " + std::to_string(dense->in_dim()) + "\n";
            write_values(out, "weights", dense->weights);
            write_values(out, "bias", dense->bias);
        } else if (std::holds_alternative<Relu>(layer)) {
            out += "relu\n";
        } else {
            out += "flatten\n";
        }
    }
    out += "end\n";
    return out;
}

Checkpoint parse_checkpoint(std::string_view text) {
    Reader r(text);
    Checkpoint ck;
    Model& m = ck.model;

    if (r.number<int>(r.single(kMagic)) != kCheckpointVersion) {
        r.fail("unsupported checkpoint version");
    }
    const auto arch = r.single("architecture");
    const auto season = r.single("season");
    if (season != "none") {
        try {
            m.meta.season = parse_season(season);
        } catch (const ArgumentError& e) {
            r.fail(e.what());
        }
    }
    m.meta.seed = r.number<std::uint64_t>(r.single("seed"));
    m.input_len = r.number<std::size_t>(r.single("input_len"));
    if (arch == "cnn") {
        CnnSpec spec;
        spec.input_len = m.input_len;
        spec.conv_channels = r.sizes(r.field("cnn.conv_channels"));
        spec.kernel = r.number<std::size_t>(r.single("cnn.kernel"));
        spec.pool_width = r.number<std::size_t>(r.single("cnn.pool_width"));
        spec.dense_widths = r.sizes(r.field("cnn.dense_widths"));
        m.meta.spec = spec;
    } else if (arch == "bp") {
        MlpSpec spec;
        spec.input_len = m.input_len;
        spec.hidden_widths = r.sizes(r.field("mlp.hidden_widths"));
        m.meta.spec = spec;
    } else if (arch != "custom") {
        r.fail("unknown architecture '" + std::string(arch) + "'");
    }
    ck.periods.train_first_year = r.number<int>(r.single("period.train_first_year"));
    ck.periods.train_last_year = r.number<int>(r.single("period.train_last_year"));
    ck.periods.test_year = r.number<int>(r.single("period.test_year"));
    m.norm_stats.min = r.number<double>(r.single("norm.min"));
    m.norm_stats.max = r.number<double>(r.single("norm.max"));
    if (!(m.norm_stats.max > m.norm_stats.min)) {
        r.fail("norm.max must exceed norm.min");
    }
    ck.best_epoch = r.number<std::size_t>(r.single("best_epoch"));
    ck.best_val_loss = r.number<double>(r.single("best_val_loss"));

    const auto layer_count = r.number<std::size_t>(r.single("layers"));
    for (std::size_t n = 0; n < layer_count; ++n) {
        const auto toks = r.tokens();
        const auto kind = toks.front();
        const auto args = r.sizes(std::span(toks).subspan(1));
        if (kind == "conv1d" && args.size() == 4) {
            Conv1d conv;
            conv.weights = r.values("weights", positive_shape(r, {args[0], args[1], args[2]}));
            conv.bias = r.values("bias", positive_shape(r, {args[0]}));
            conv.stride = args[3];
            if (conv.stride == 0) {
                r.fail("conv1d stride must be >= 1");
            }
            m.layers.emplace_back(std::move(conv));
        } else if (kind == "dense" && args.size() == 2) {
            Dense dense;
            dense.weights = r.values("weights", positive_shape(r, {args[0], args[1]}));
            dense.bias = r.values("bias", positive_shape(r, {args[0]}));
            m.layers.emplace_back(std::move(dense));
        } else if (kind == "maxpool1d" && args.size() == 2) {
            if (args[0] == 0 || args[1] == 0) {
                r.fail("maxpool1d width and stride must be >= 1");
            }
            m.layers.emplace_back(MaxPool1d{args[0], args[1]});
        } else if (kind == "relu" && args.empty()) {
            m.layers.emplace_back(Relu{});
        } else if (kind == "flatten" && args.empty()) {
            m.layers.emplace_back(Flatten{});
        } else {
            r.fail("malformed layer '" + std::string(kind) + "'");
        }
    }
    if (!r.field("end").empty()) {
        r.fail("trailing tokens after 'end'");
    }
    if (!r.at_end()) {
        r.fail("content after 'end'");
    }

    try {
        check_against_spec(m);
        validate_model(m);
    } catch (const SpecError& e) {
        throw CheckpointError(std::string("checkpoint spec is invalid: ") + e.what());
    } catch (const ShapeError& e) {
        throw CheckpointError(std::string("checkpoint layers do not compose: ") + e.what());
    }
    return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write checkpoint " + path.string());
    }
    out << serialize_checkpoint(checkpoint);
    if (!out.flush()) {
        throw IoError("failed writing checkpoint " + path.string());
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open checkpoint " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_checkpoint(buf.str());
    } catch (const CheckpointError& e) {
        throw CheckpointError(path.filename().string() + ": " + e.what());
    }
}

}  // namespace pricecast
