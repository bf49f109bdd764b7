#pragma once

#include <stdexcept>
#include <string>

namespace bct {

// Malformed or inconsistent caller input (bad dimensions, ranges, files).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stochastic generator gave up after its attempt budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or other numerical routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The realized assignment is not owned by any biclique of the decomposition,
// so no conditionally valid test exists for it.
class UntestableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A ±1 assignment column with only one sign; z-tilde is undefined there.
class DegenerateColumnError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace bct
