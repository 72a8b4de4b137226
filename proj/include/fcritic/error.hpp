#pragma once

#include <stdexcept>
#include <string>

namespace fcritic {

/// Invalid argument passed to a toolkit operation (bad grid, empty input, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid or inconsistent configuration: unknown keys, missing credentials.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantity whose normalizing scale is zero (e.g. sCRPS with all-zero actuals).
class UndefinedScaleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-recoverable failure talking to a critic backend.
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transport-level failure that may succeed on retry (timeouts, 5xx, 429).
class TransientBackendError : public BackendError {
public:
    using BackendError::BackendError;
};

/// Critic response without a usable <answer> tag.
class UnparseableVerdict : public std::runtime_error {
public:
    UnparseableVerdict(const std::string& what, std::string raw)
        : std::runtime_error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

}  // namespace fcritic
