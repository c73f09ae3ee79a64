#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pucci {

enum class ErrorKind {
    InvalidParams,
    InvalidInput,
    InvalidAnnulus,
    StepLimitExceeded,
    StiffnessFailure,
    BracketFailure,
    NoTransitionFound,
    PrecisionLoss,
    ConfigParse,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Integrator failure. Carries the last accepted state so callers can report
/// how far the integration got.
class IntegrationError : public Error {
public:
    IntegrationError(ErrorKind kind, const std::string& message, double last_t,
                     std::array<double, 2> last_state)
        : Error(kind, message), last_t_(last_t), last_state_(last_state) {}

    double last_t() const noexcept { return last_t_; }
    const std::array<double, 2>& last_state() const noexcept { return last_state_; }

private:
    double last_t_;
    std::array<double, 2> last_state_;
};

}  // namespace pucci
