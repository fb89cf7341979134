#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fracl1 {

/// Invalid caller input (bad order, mesh size, unsupported combination).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the supported mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Breakdown of a numerical procedure (singular pivot, non-finite iterate).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what,
                            std::optional<std::size_t> step = std::nullopt)
        : std::runtime_error(step ? what + " (time step " + std::to_string(*step) + ")" : what),
          step_(step) {}

    std::optional<std::size_t> step() const noexcept { return step_; }

private:
    std::optional<std::size_t> step_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fracl1
