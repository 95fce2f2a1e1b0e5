#pragma once

#include <stdexcept>
#include <string>

namespace npe {

// Thrown when a solve that needs mean-zero input (Poisson, Biot-Savart)
// receives a field with a nonvanishing mean: an un-neutralized charge or
// vorticity field.
class NonZeroMeanError : public std::runtime_error {
public:
    explicit NonZeroMeanError(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf detected in a field: blow-up or a time step that is too large.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

class DimensionMismatchError : public std::invalid_argument {
public:
    explicit DimensionMismatchError(const std::string& what) : std::invalid_argument(what) {}
};

// Picard iteration failed to contract: the local time horizon is too large.
class NoContractionError : public std::runtime_error {
public:
    explicit NoContractionError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, int line) : ConfigError(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class ValidationError : public ConfigError {
public:
    explicit ValidationError(const std::string& what) : ConfigError(what) {}
};

class SnapshotError : public std::runtime_error {
public:
    enum class Kind { BadMagic, VersionMismatch, ChecksumMismatch, Io };
    SnapshotError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace npe
