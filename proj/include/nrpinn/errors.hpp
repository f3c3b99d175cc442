#pragma once

#include <stdexcept>
#include <string>

namespace nrpinn {

/// Invalid shapes, ranges, or configuration values.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// NaN/Inf in a loss term, non-convergence, or a detected instability.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string &what, std::string term = {})
        : std::runtime_error(what), term_(std::move(term)) {}

    /// Name of the offending term, empty when not attributable.
    [[nodiscard]] const std::string &term() const noexcept { return term_; }

  private:
    std::string term_;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Requested feature has no implementation for the given family/parameters.
class UnsupportedError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace nrpinn
