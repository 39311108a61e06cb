#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace coordsim {

/// Thrown when a config or input violates a documented precondition.
/// field() carries a dotted path to the offending field ("cost_params.gamma").
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, std::string message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)),
          message_(std::move(message)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

} // namespace coordsim
