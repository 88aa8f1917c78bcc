#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

/// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad permutation, out-of-range letter, schema violation,
/// inconsistent machine data, unparsable word, unsupported operation.
struct StructuralError : Error {
  using Error::Error;
};

/// A decision procedure ran out of its explicit budget. Never a wrong answer:
/// callers see this instead of an unsound boolean.
struct BudgetError : Error {
  using Error::Error;
};

}  // namespace selfsim
