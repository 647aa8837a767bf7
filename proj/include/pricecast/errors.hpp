#pragma once

#include <stdexcept>
#include <string>

namespace pricecast {

// Each category maps onto one CLI exit code (see tools/commands.hpp).
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or insufficient price data: gaps, constant series, empty partitions.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed CSV row or config line; carries the 1-based line number.
struct ParseError : DataError {
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Model or run configuration that cannot be built.
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pricecast
