#pragma once

#include <stdexcept>
#include <string>

namespace hsp {

/// Invalid or inconsistent configuration (grid, kernel, mesh, capacity).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its target accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimation cannot proceed on the given data (degenerate or infeasible input).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hsp
