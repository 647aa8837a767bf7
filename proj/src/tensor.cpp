#include "pricecast/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "pricecast/errors.hpp"

namespace pricecast {

namespace {

void validate_dims(const std::vector<std::size_t>& dims) {
    if (dims.empty() || dims.size() > 3) {
        throw ShapeError("tensor rank must be 1..3, got " + std::to_string(dims.size()));
    }
    for (auto d : dims) {
        if (d == 0) {
            throw ShapeError("tensor dims must be positive");
        }
    }
}

}  // namespace

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) { validate_dims(dims_); }

std::size_t Shape::size() const noexcept {
    if (dims_.empty()) {
        return 0;
    }
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>{});
}

std::string Shape::to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += std::to_string(dims_[i]);
    }
    return out + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_.size(), fill) {
    if (shape_.rank() == 0) {
        throw ShapeError("tensor requires a non-empty shape");
    }
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.rank() == 0 || data_.size() != shape_.size()) {
        throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                         shape_.to_string());
    }
}

Tensor Tensor::vector(std::vector<double> values) {
    Shape shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::reshaped(Shape shape) const {
    if (shape.size() != data_.size()) {
        throw ShapeError("cannot reshape " + shape_.to_string() + " to " + shape.to_string());
    }
    return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor tensor_new(const Shape& shape, double fill) {
    if (!std::isfinite(fill)) {
        throw ArgumentError("tensor fill value must be finite");
    }
    return Tensor(shape, fill);
}

std::uint64_t Prng::next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Prng::next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Prng::next_gaussian() noexcept {
    double u1 = next_uniform();
    const double u2 = next_uniform();
    if (u1 == 0.0) {
        u1 = 0x1.0p-53;  // smallest positive value on the 53-bit grid; keeps log finite
    }
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Prng::next_below(std::uint64_t bound) noexcept {
    // Modulo bias is below bound / 2^64, negligible for shuffle-sized bounds.
    return next_u64() % bound;
}

Tensor he_init(Prng& prng, const Shape& shape, std::size_t fan_in) {
    if (fan_in == 0) {
        throw ArgumentError("he_init: fan_in must be >= 1");
    }
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Tensor out(shape, 0.0);
    for (auto& v : out.data()) {
        v = stddev * prng.next_gaussian();
    }
    return out;
}

}  // namespace pricecast
