#include "pricecast/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, std::string_view key) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw SpecError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::size_t> parse_list(std::string_view text, std::string_view key) {
    std::vector<std::size_t> out;
    if (trim(text).empty()) {
        return out;
    }
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_number<std::size_t>(trim(text.substr(0, comma)), key));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

bool parse_bool(std::string_view text, std::string_view key) {
    if (text == "true") {
        return true;
    }
    if (text == "false") {
        return false;
    }
    throw SpecError("config key '" + std::string(key) + "': expected true or false");
}

using Setter = std::function<void(RunConfig&, std::string_view value, std::string_view key)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table{
        {"cnn.conv_channels", [](RunConfig& c, auto v, auto k) { c.cnn.conv_channels = parse_list(v, k); }},
        {"cnn.kernel", [](RunConfig& c, auto v, auto k) { c.cnn.kernel = parse_number<std::size_t>(v, k); }},
        {"cnn.pool_width", [](RunConfig& c, auto v, auto k) { c.cnn.pool_width = parse_number<std::size_t>(v, k); }},
        {"cnn.dense_widths", [](RunConfig& c, auto v, auto k) { c.cnn.dense_widths = parse_list(v, k); }},
        {"mlp.hidden_widths", [](RunConfig& c, auto v, auto k) { c.mlp.hidden_widths = parse_list(v, k); }},
        {"train.learning_rate", [](RunConfig& c, auto v, auto k) { c.train.learning_rate = parse_number<double>(v, k); }},
        {"train.epochs", [](RunConfig& c, auto v, auto k) { c.train.epochs = parse_number<std::size_t>(v, k); }},
        {"train.batch_size", [](RunConfig& c, auto v, auto k) { c.train.batch_size = parse_number<std::size_t>(v, k); }},
        {"train.seed", [](RunConfig& c, auto v, auto k) { c.train.seed = parse_number<std::uint64_t>(v, k); }},
        {"train.patience", [](RunConfig& c, auto v, auto k) { c.train.patience = parse_number<std::size_t>(v, k); }},
        {"train.val_fraction", [](RunConfig& c, auto v, auto k) { c.train.val_fraction = parse_number<double>(v, k); }},
        {"train.beta1", [](RunConfig& c, auto v, auto k) { c.train.beta1 = parse_number<double>(v, k); }},
        {"train.beta2", [](RunConfig& c, auto v, auto k) { c.train.beta2 = parse_number<double>(v, k); }},
        {"train.epsilon", [](RunConfig& c, auto v, auto k) { c.train.epsilon = parse_number<double>(v, k); }},
        {"train.clip_gradients", [](RunConfig& c, auto v, auto k) { c.train.clip_gradients = parse_bool(v, k); }},
        {"period.train_first_year", [](RunConfig& c, auto v, auto k) { c.periods.train_first_year = parse_number<int>(v, k); }},
        {"period.train_last_year", [](RunConfig& c, auto v, auto k) { c.periods.train_last_year = parse_number<int>(v, k); }},
        {"period.test_year", [](RunConfig& c, auto v, auto k) { c.periods.test_year = parse_number<int>(v, k); }},
    };
    return table;
}

std::string join(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? ", " : "") + std::to_string(values[i]);
    }
    return out;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void validate(const RunConfig& config) {
    (void)cnn_length_chain(config.cnn);
    for (auto w : config.cnn.dense_widths) {
        if (w == 0) {
            throw SpecError("cnn.dense_widths entries must be >= 1");
        }
    }
    for (auto w : config.mlp.hidden_widths) {
        if (w == 0) {
            throw SpecError("mlp.hidden_widths entries must be >= 1");
        }
    }
    validate(config.train);
    const auto& p = config.periods;
    if (p.train_first_year > p.train_last_year || p.train_last_year >= p.test_year) {
        throw SpecError("periods must satisfy train_first_year <= train_last_year < test_year");
    }
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string, std::less<>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty() || content.front() == '#') {
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string_view::npos) {
            throw SpecError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(content.substr(0, eq));
        const auto value = trim(content.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw SpecError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        if (!seen.emplace(key).second) {
            throw SpecError("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        try {
            it->second(config, value, key);
        } catch (const SpecError& e) {
            throw SpecError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate(config);
    return config;
}

std::string render_run_config(const RunConfig& c) {
    std::string out;
    const auto put = [&](const char* key, const std::string& value) { out += std::string(key) + " = " + value + "\n"; };
    put("cnn.conv_channels", join(c.cnn.conv_channels));
    put("cnn.kernel", std::to_string(c.cnn.kernel));
    put("cnn.pool_width", std::to_string(c.cnn.pool_width));
    put("cnn.dense_widths", join(c.cnn.dense_widths));
    put("mlp.hidden_widths", join(c.mlp.hidden_widths));
    put("train.learning_rate", num(c.train.learning_rate));
    put("train.epochs", std::to_string(c.train.epochs));
    put("train.batch_size", std::to_string(c.train.batch_size));
    put("train.seed", std::to_string(c.train.seed));
    put("train.patience", std::to_string(c.train.patience));
    put("train.val_fraction", num(c.train.val_fraction));
    put("train.beta1", num(c.train.beta1));
    put("train.beta2", num(c.train.beta2));
    put("train.epsilon", num(c.train.epsilon));
    put("train.clip_gradients", c.train.clip_gradients ? "true" : "false");
    put("period.train_first_year", std::to_string(c.periods.train_first_year));
    put("period.train_last_year", std::to_string(c.periods.train_last_year));
    put("period.test_year", std::to_string(c.periods.test_year));
    return out;
}

}  // namespace pricecast
