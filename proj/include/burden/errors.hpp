#pragma once

#include <stdexcept>
#include <string>

namespace burden {

// A sample or classifier does not match the declared feature schema.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A conditional metric was requested on an empty conditioning set.
struct UndefinedMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No admissible manipulation exists (e.g. every feature cost is infinite).
struct InfeasibleManipulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ill-conditioned or non-positive-definite numerical input.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries row/column location where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inputs violate a documented invariant (configs, tables, cost models).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A constrained selection or training problem has no feasible point.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace burden
