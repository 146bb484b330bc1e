#ifndef MVFLOW_ERRORS_HPP
#define MVFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mvflow {

// Bad user input: configs, parameter ranges, mismatched sizes. Exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while computing: non-finite values, positivity loss,
// non-convergent iterations. Exit code 2.
class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mvflow

#endif
