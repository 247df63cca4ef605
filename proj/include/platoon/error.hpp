#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

/// A caller broke an operation's precondition (e.g. asked for the leader's
/// headway on an open road).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid parameters or configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The integrator produced a non-finite state. Maps to CLI exit code 3.
class NumericAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The eigenvalue iteration did not converge, or a computed eigenpair failed
/// its residual check. Maps to CLI exit code 4.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read or written. Maps to CLI exit code 5.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace platoon
