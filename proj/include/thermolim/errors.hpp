#pragma once

#include <stdexcept>
#include <string>

namespace thermolim {

// Exit-code mapping used by the CLI: ConfigError and GateError -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (grid sizes, support outside the box, bad config keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller mixed incompatible objects, e.g. functions sampled on different grids.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Mathematically undefined request (divergent Bose weight, lambda <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A validity gate (box margin, edge amplitude, quadrature convergence) failed.
class GateError : public Error {
 public:
  using Error::Error;
};

/// Fock-space truncation discards too much Gibbs weight.
class TruncationError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermolim
