#pragma once

namespace pricecast {

/// Min-max scaling bounds in $/MWh, taken from a season's training hours only.
struct NormStats {
    double min = 0.0;
    double max = 1.0;

    friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// (x - min) / (max - min). Throws DataError when max <= min.
double normalize(double x, const NormStats& stats);
double denormalize(double x, const NormStats& stats);

}  // namespace pricecast
