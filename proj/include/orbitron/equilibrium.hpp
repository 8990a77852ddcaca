#pragma once

#include <array>
#include <vector>

#include "orbitron/body.hpp"
#include "orbitron/fields.hpp"

namespace orbitron {

// Full problem statement: field, body, orbit radius, gravity.
struct EquilibriumProblem {
  FieldModel field;
  BodyParams body;
  double r0 = 0.0;  // orbit radius, m
  double g = 9.81;  // m/s^2

  void validate() const;
};

// lambda = m B'/(M g), sigma = -dBz/dr / B' at the orbit radius.
struct DimensionlessParams {
  double lambda = 0.0;
  double sigma = 0.0;
};

enum class EquilibriumClass { kOrbital, kStatic };

// Steady state: uniform circular orbit at rate xi1 with fixed attitude
// nu = (nu1, 0, nu3) and spin angular momentum pi = (pi1, 0, pi3), all in
// the co-rotating vertical plane; p0 = M xi1 r0 along e2.
struct RelativeEquilibrium {
  EquilibriumClass cls = EquilibriumClass::kOrbital;
  double r0 = 0.0;
  double zeta_sq = 0.0;    // selected root of the constraint quadratic
  double xi1 = 0.0;        // orbit rate, rad/s
  double xi2_tilde = 0.0;  // effective spin multiplier, rad/s
  double xi2 = 0.0;        // bare spin multiplier (derived diagnostic)
  double nu1 = 0.0, nu3 = 1.0;
  double pi1 = 0.0, pi3 = 0.0;  // kg*m^2/s
  double p0 = 0.0;              // kg*m/s

  double lambda = 0.0, sigma = 0.0;
  std::vector<double> zeta_sq_roots;  // admissible roots, descending

  std::array<Vec3, 4> residuals{};  // the four necessary-condition rows
  double residual_max = 0.0;

  Vec3 position() const { return {r0, 0.0, 0.0}; }
  Vec3 momentum() const { return {0.0, p0, 0.0}; }
  Vec3 attitude() const { return {nu1, 0.0, nu3}; }
  Vec3 spin() const { return {pi1, 0.0, pi3}; }
};

// lambda and sigma for the problem. Throws DegenerateField when B' == 0.
DimensionlessParams dimensionless_params(const EquilibriumProblem& prob);

// Real non-negative roots of
//   (1+sigma^2) u^2 - sigma u + (sigma^2 + 1/4 - lambda^2 (sigma^2+1/2)^2) = 0,
// sorted descending; the first entry is the designated '+' branch.
// Throws NoRealEquilibrium / NoAdmissibleRoot.
std::vector<double> solve_zeta_squared(const DimensionlessParams& dp);

// Attitude components for a given root:
//   nu1 = (zeta^2 - sigma) / (lambda (sigma^2 + 1/2))
//   nu3 = (sigma zeta^2 + 1/2) / (lambda (sigma^2 + 1/2))
std::pair<double, double> solve_attitude(const DimensionlessParams& dp,
                                         double zeta_sq);

struct SpinSolution {
  double pi1 = 0.0;
  double pi3 = 0.0;
  double xi2_tilde = 0.0;
};

// Spin momentum and effective multiplier from the torque rows:
//   pi1 = m(nu3 B1 - nu1 B3)/xi1
//   pi3 = xi1/alpha + (nu3/nu1) m(nu3 B1 - nu1 B3)/xi1
//   xi2_tilde = -alpha m(nu3 B1 - nu1 B3)/(xi1 nu1)
// Throws DegenerateAttitude when |nu1| is below tolerance.
SpinSolution solve_spin(const EquilibriumProblem& prob, double xi1, double nu1,
                        double nu3);

// Full solve. The zeta^2 = 0 case is classified kStatic (pure hover attitude
// nu = e3, xi1 = 0) and is not pushed through the spin formulas.
RelativeEquilibrium solve_equilibrium(const EquilibriumProblem& prob);

// Left-hand sides of the four necessary-condition rows evaluated at the
// given state; used as solver post-check and as a test oracle.
std::array<Vec3, 4> residual_necessary_conditions(const RelativeEquilibrium& s,
                                                  const EquilibriumProblem& prob);

}  // namespace orbitron
