#pragma once

#include <stdexcept>
#include <string>

namespace xsort {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user-supplied configuration (non-power-of-two p, unknown input kind, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Members of one group entered different collectives, or the same collective
/// with disagreeing arguments.
class CollectiveMismatch : public Error {
 public:
  using Error::Error;
};

/// Unmatched point-to-point traffic or a rank that never arrived.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Raised in surviving ranks after another rank failed.
class FabricAborted : public Error {
 public:
  using Error::Error;
};

/// A per-iteration debug assertion failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void throw_contract(const std::string& what);

}  // namespace xsort
