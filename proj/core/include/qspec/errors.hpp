#pragma once

#include <stdexcept>
#include <string>

namespace qspec {

/// Caller broke a documented precondition (bad length, out-of-range index).
class ContractViolation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid or unsupported experiment / system configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Iterative numerics failed (non-convergence, non-finite values).
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The 2x2 endpoint system for a compact basis function is singular.
class BasisConstructionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dense solve hit a (numerically) rank-deficient matrix.
class SingularSystemError : public std::runtime_error {
  public:
    SingularSystemError(const std::string &what, double condition_estimate)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    [[nodiscard]] double condition_estimate() const noexcept {
        return condition_estimate_;
    }

  private:
    double condition_estimate_;
};

/// A norm used as a denominator vanished.
class DivisionGuardError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Truncation removed every Pauli term.
class TruncationDegenerateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The loss radicand <a|A^dag A|a> fell below tolerance.
class DegenerateDenominatorError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qspec
