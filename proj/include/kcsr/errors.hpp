#pragma once

#include <stdexcept>
#include <string>

namespace kcsr {

// Invalid caller input (bad flags, malformed files, mismatched shapes).
// Surfaces as CLI exit code 1.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Arithmetic breakdown (singular systems, non-finite iterates).
// Surfaces as CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Refusal on resource grounds (full-kernel memory cap).
// Surfaces as CLI exit code 3.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broken internal invariant; indicates a bug, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace kcsr
