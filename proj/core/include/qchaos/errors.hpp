#pragma once

#include <stdexcept>
#include <string>

namespace qchaos {

// Every failure raised by the library derives from Error. InvariantViolation
// covers numerical contract breaches (exit code 2 in the CLI); ConfigError
// covers malformed input (exit code 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Probability mass reached the outer 5% of the spatial grid.
class GridOverflow : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class NonfiniteState : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class NonfiniteField : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class TraceDrift : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class NegativeDensity : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class ClosureBreakdown : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

class StretchOverflow : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

// A localization or low-noise criterion evaluated where the force vanishes.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

}  // namespace qchaos
