#pragma once

#include <stdexcept>
#include <string>

namespace velast {

// Raised when a spectral power needs strictly positive eigenvalues
// (non-integer exponent) but the smallest eigenvalue is at or below
// the positivity floor.
struct NonPositiveEigenvalue : std::domain_error {
  using std::domain_error::domain_error;
};

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Mesh file violated the grammar (bad token, unknown section, ...).
struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

// Mesh parsed fine but the geometry/topology contract is broken.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constraint row is numerically invisible to the operator (b A^-1 b ~ 0).
struct DegenerateConstraint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FixedPointDiverged : std::runtime_error {
  FixedPointDiverged(const std::string& what, int iters)
      : std::runtime_error(what), iterations(iters) {}
  int iterations;
};

// Deformation gradient determinant hit zero somewhere: the configuration
// stopped being locally invertible.
struct InvertibilityLost : std::runtime_error {
  InvertibilityLost(const std::string& what, double t_star)
      : std::runtime_error(what), time(t_star) {}
  double time;
};

struct IncompatibleInitialData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fractional-norm exponents outside the admissible range.
struct InvalidExponent : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace velast
