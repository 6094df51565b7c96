#ifndef USTAT_ERRORS_HPP
#define USTAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ustat {

/// Raised when a computation would exceed its configured evaluation or
/// enumeration budget. CLI maps this to exit code 3.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a run violates a theorem hypothesis; the message names the
/// violated condition, e.g. "(A)" or "(AC)".
class HypothesisError : public std::runtime_error {
public:
    explicit HypothesisError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration / input-document errors, with location context when known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ustat

#endif
