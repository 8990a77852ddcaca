#pragma once

#include <stdexcept>
#include <string>

namespace orbitron {

// Base class for all structured failures of the library. Callers that need
// the CLI exit-code convention catch the concrete types below.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Field evaluation requested within the guard distance of a magnetic pole.
class PoleSingularity : public Error {
public:
  using Error::Error;
};

// B' == 0: the dimensionless formulation breaks down.
class DegenerateField : public Error {
public:
  using Error::Error;
};

// The discriminant of the attitude constraint quadratic is negative: no
// relative equilibrium exists for these parameters.
class NoRealEquilibrium : public Error {
public:
  using Error::Error;
};

// Both quadratic roots are negative: no physically admissible orbit rate.
class NoAdmissibleRoot : public Error {
public:
  using Error::Error;
};

// nu1 -> 0 (spin solve) or nu3 -> 0 (admissible-variation elimination):
// the closed-form solution divides by the vanishing component.
class DegenerateAttitude : public Error {
public:
  using Error::Error;
};

// The reduced quadratic form did not decouple into its two blocks.
// Indicates an assembly bug or an input that is not a relative equilibrium.
class BlockStructureViolation : public Error {
public:
  using Error::Error;
};

// Adaptive step-size controller underflow.
class StepFailure : public Error {
public:
  using Error::Error;
};

// Configuration file / override parse problem, with location info.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace orbitron
