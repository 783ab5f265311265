#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uwbaoa {

// Argument validation uses std::invalid_argument directly. The types below
// carry extra context or need to be caught separately.

struct EmptyInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Circular mean requested for a sample set whose unit vectors cancel out.
struct UndefinedMeanError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Arcsine argument of the PDoA -> AoA inversion left [-1, 1].
class ArcsineDomainError : public std::domain_error {
public:
    ArcsineDomainError(double argument, double clamped_aoa_deg)
        : std::domain_error("arcsine argument " + std::to_string(argument) + " outside [-1, 1]"),
          argument_(argument), clamped_aoa_deg_(clamped_aoa_deg) {}

    double argument() const noexcept { return argument_; }
    /// AoA obtained by clamping the argument to [-1, 1].
    double clamped_aoa_deg() const noexcept { return clamped_aoa_deg_; }

private:
    double argument_;
    double clamped_aoa_deg_;
};

struct GeometryError : std::domain_error {
    using std::domain_error::domain_error;
};

struct MalformedExchangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LowSignalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Missing or unknown column in a dataset or mapping file.
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& field, const std::string& what)
        : std::runtime_error(what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Row that cannot be parsed. Line numbers are 1-based and count the header.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& field, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          line_(line), field_(field) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

struct WindowOutOfBoundsError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

class TrainingDivergedError : public std::runtime_error {
public:
    explicit TrainingDivergedError(int epoch)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}
    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

struct DegenerateFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelLoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientRecordsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace uwbaoa
