#pragma once

#include <cstdint>
#include <string_view>

#include "pricecast/data.hpp"
#include "pricecast/model.hpp"

namespace pricecast {

enum class Architecture { Cnn, Bp };

/// Throws ArgumentError unless `name` is "cnn" or "bp".
Architecture parse_architecture(std::string_view name);

struct GradCheckCase {
    Model model;
    WindowSample sample;
};

/// Random small architecture of the requested family (valid shape chain
/// guaranteed), He weights, small random biases, and a random sample with
/// inputs and target in [0, 1). Pure function of (arch, seed).
GradCheckCase make_gradcheck_case(Architecture arch, std::uint64_t seed);

inline constexpr double kGradCheckEpsilon = 1e-5;
inline constexpr double kGradCheckTolerance = 1e-4;

}  // namespace pricecast
