#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "pricecast/data.hpp"
#include "pricecast/model.hpp"

namespace pricecast {

inline constexpr int kCheckpointVersion = 1;

/// A trained model plus everything needed to reuse it on new data.
struct Checkpoint {
    Model model;
    PeriodBounds periods;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
};

/// Line-oriented text. Doubles are written with 17 significant digits, so
/// save -> load -> save is byte-identical and every parameter bit survives.
std::string serialize_checkpoint(const Checkpoint& checkpoint);

/// Throws CheckpointError on any malformed or inconsistent content.
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pricecast
