#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace replidyn {

// Requested a quantity tied to the interior stationary point, but none lies
// strictly inside (0,1)^2 for the given parameters.
struct NoInteriorPointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The conserved quantity involves ln(x), ln(1-x), ln(y), ln(1-y) and is
// undefined on the boundary of the unit square.
struct BoundaryStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An integration stage produced a NaN or infinity.
struct NonFiniteStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The adaptive step controller underflowed its minimum step size.
struct StepFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Separatrix extraction needs an interior saddle (bistable regime).
struct NoSaddleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioParseError : std::runtime_error {
  ScenarioParseError(const std::string& what, std::size_t byte)
      : std::runtime_error(what), byte_offset(byte) {}
  std::size_t byte_offset;
};

struct ScenarioValidationError : std::runtime_error {
  ScenarioValidationError(const std::string& what, std::vector<std::string> v)
      : std::runtime_error(what), violations(std::move(v)) {}
  std::vector<std::string> violations;
};

}  // namespace replidyn
