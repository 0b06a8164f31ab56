#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aqs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or malformed models: invalid networks, out-of-range indices,
// negative rates, mismatched dimensions.
class InputError : public Error {
 public:
  using Error::Error;
};

// A parameter or config file failed to parse. Carries every violation found,
// each already prefixed with its line number.
class ParseError : public InputError {
 public:
  explicit ParseError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Integrator or eigensolver failure (step-size underflow, non-convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A physical or structural invariant was violated at runtime, e.g. trace drift
// of a density matrix or an emulation report without external checks.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqs
