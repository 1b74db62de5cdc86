#ifndef IQSWITCH_ERRORS_HPP
#define IQSWITCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace iqswitch {

/// Raised for malformed inputs: dimension mismatches, out-of-range
/// parameters, invalid scheduler/parameter combinations.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative routine exhausts its budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Raised when a queue entry would leave the 64-bit range.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

} // namespace iqswitch

#endif // IQSWITCH_ERRORS_HPP
