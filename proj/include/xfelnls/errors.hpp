#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xfelnls {

/// Precondition or postcondition of an operation was violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The requested combination of options is not supported (e.g. a 3D kernel on a 1D grid,
/// or a vector potential for a profile without a derivative).
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration value failed validation. `field()` names the dotted key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite values appeared in the state after a time step.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, double time)
      : std::runtime_error("non-finite state after step " + std::to_string(step) +
                           " (t=" + std::to_string(time) + ")"),
        step_(step),
        time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xfelnls
