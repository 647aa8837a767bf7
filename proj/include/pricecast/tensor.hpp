#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pricecast {

/// Dimensions of a rank-1, rank-2 or rank-3 tensor. Every dim is >= 1.
class Shape {
public:
    Shape() = default;
    Shape(std::initializer_list<std::size_t> dims);
    explicit Shape(std::vector<std::size_t> dims);

    std::size_t rank() const noexcept { return dims_.size(); }
    std::size_t operator[](std::size_t axis) const { return dims_[axis]; }
    std::size_t size() const noexcept;
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
};

/// Dense row-major tensor of doubles.
class Tensor {
public:
    Tensor() = default;
    Tensor(Shape shape, double fill);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor vector(std::vector<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    /// Same data under a new shape with an equal element count.
    Tensor reshaped(Shape shape) const;

    bool all_finite() const noexcept;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Throws ShapeError on an invalid shape and ArgumentError on a non-finite fill.
Tensor tensor_new(const Shape& shape, double fill);

/// SplitMix64 generator. Copying a Prng forks an identical stream.
class Prng {
public:
    explicit Prng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    double next_uniform() noexcept;
    /// Box-Muller standard normal. Consumes two u64 draws per call.
    double next_gaussian() noexcept;
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) noexcept;

    std::uint64_t state() const noexcept { return state_; }

    friend bool operator==(const Prng&, const Prng&) = default;

private:
    std::uint64_t state_;
};

/// Gaussian tensor with standard deviation sqrt(2 / fan_in).
Tensor he_init(Prng& prng, const Shape& shape, std::size_t fan_in);

}  // namespace pricecast
