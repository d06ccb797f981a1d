#pragma once

#include <stdexcept>
#include <string>

namespace magsense {

/// Raised for physically meaningless inputs (non-positive dissipation, negative temperature, ...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// The anisotropy is outside the range where the squeeze amplitude is real.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Closed-form response evaluated on (or numerically at) a pole.
class PoleError : public NumericalError {
 public:
  PoleError(const std::string& what, double omega) : NumericalError(what), omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// Operation called outside the regime where it is defined (e.g. budget off the
/// backaction-evading point).
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

/// Simulation configuration fails its stability / steady-state guards.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace magsense
