#pragma once

#include <stdexcept>
#include <string>

namespace qnet {

/// A physics precondition does not hold for the requested computation
/// (odd-cycle topology, off-resonant graph, unsupported excitation
/// content). Distinct from malformed input so callers can report it as a
/// scientific refusal rather than a configuration mistake.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Numerical failure at runtime: integrator instability, non-convergence,
/// eigensolver breakdown.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

} // namespace qnet
