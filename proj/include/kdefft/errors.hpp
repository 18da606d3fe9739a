#pragma once

#include <stdexcept>
#include <string>

namespace kdefft {

// Category bases; the CLI maps these onto exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSquare : InputError {
    using InputError::InputError;
};
struct NotSymmetric : InputError {
    using InputError::InputError;
};
struct NotPositiveDefinite : InputError {
    using InputError::InputError;
};
struct DegenerateRange : InputError {
    using InputError::InputError;
};
struct DegenerateCovariance : InputError {
    using InputError::InputError;
};
struct BadGridSize : ConfigError {
    using ConfigError::ConfigError;
};
struct FileNotFound : InputError {
    using InputError::InputError;
};
struct ParseError : InputError {
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};
struct InconsistentColumns : InputError {
    InconsistentColumns(std::size_t line, std::size_t expected, std::size_t got)
        : InputError("line " + std::to_string(line) + ": expected " + std::to_string(expected) +
                     " columns, got " + std::to_string(got)),
          line(line) {}
    std::size_t line;
};

struct DimensionMismatch : NumericError {
    using NumericError::NumericError;
};
struct ShapeMismatch : NumericError {
    using NumericError::NumericError;
};
struct BadSupport : NumericError {
    using NumericError::NumericError;
};
struct NumericalResidue : NumericError {
    using NumericError::NumericError;
};
struct WindowOutOfRange : NumericError {
    using NumericError::NumericError;
};

}  // namespace kdefft
