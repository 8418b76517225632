#pragma once

#include <stdexcept>
#include <string>

namespace saccade {

/// A caller broke a documented precondition (bad fixation, probability out of range, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An observation frame carried evidence that cannot be ingested.
class RejectedFrame : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Free energy diverged: evidence is impossible under a deterministic sensor.
class ContradictionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A wire-protocol record could not be parsed. Keeps the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::string line)
        : std::runtime_error(what), line_(std::move(line)) {}

    const std::string& line() const noexcept { return line_; }

private:
    std::string line_;
};

/// Invalid scenario/model configuration; the message starts with the field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace saccade
