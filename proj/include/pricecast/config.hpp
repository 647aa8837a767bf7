#pragma once

#include <string>
#include <string_view>

#include "pricecast/data.hpp"
#include "pricecast/model.hpp"
#include "pricecast/training.hpp"

namespace pricecast {

/// Every tunable of a run. Parsed from flat `key = value` lines:
///
///   # comment
///   cnn.conv_channels = 8, 16, 32
///   cnn.kernel = 3
///   train.epochs = 200
///
/// List values are comma separated and may be empty (`cnn.dense_widths =`).
struct RunConfig {
    CnnSpec cnn;
    MlpSpec mlp;
    TrainConfig train;
    PeriodBounds periods;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Unknown keys, malformed values and invalid specs all throw SpecError.
RunConfig parse_run_config(std::string_view text);

/// Validates an already populated config (model shape chains, train ranges, periods).
void validate(const RunConfig& config);

/// Canonical rendering; parse_run_config(render_run_config(c)) == c.
std::string render_run_config(const RunConfig& config);

}  // namespace pricecast
