#pragma once

#include <stdexcept>
#include <string>

namespace pointcert {

/// Caller passed a value that violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a scalar function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A file could not be parsed. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

/// Training diverged. Carries the epoch at which the loss became non-finite.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, int epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

    int epoch() const { return epoch_; }

private:
    int epoch_;
};

/// A request would exceed a configured resource budget (e.g. grid size).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pointcert
