#include "orbitron/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace orbitron {

namespace {
constexpr double kAttitudeTol = 1e-12;  // |nu1| below this -> degenerate spin solve
}

void EquilibriumProblem::validate() const {
  field.validate();
  body.validate();
  if (r0 <= 0.0) throw Error("orbit radius must be > 0");
  if (g <= 0.0) throw Error("gravitational acceleration must be > 0");
}

DimensionlessParams dimensionless_params(const EquilibriumProblem& prob) {
  const double bp = prob.field.linear.b_prime;
  if (bp == 0.0) {
    throw DegenerateField("B' = 0: dimensionless parameters undefined");
  }
  const MidplaneDerivs d = midplane_derivs(prob.field, prob.r0);
  DimensionlessParams dp;
  dp.lambda = prob.body.moment * bp / (prob.body.mass * prob.g);
  dp.sigma = -d.bz_r / bp;
  return dp;
}

std::vector<double> solve_zeta_squared(const DimensionlessParams& dp) {
  const double s = dp.sigma;
  const double s2 = s * s;
  // discriminant factors as (2 sigma^2 + 1)^2 (lambda^2 (1+sigma^2) - 1)
  const double disc_core = dp.lambda * dp.lambda * (1.0 + s2) - 1.0;
  if (disc_core < 0.0) {
    throw NoRealEquilibrium("lambda^2 (1+sigma^2) < 1: constraint quadratic has no real root");
  }
  const double w = (2.0 * s2 + 1.0) * std::sqrt(disc_core);
  const double den = 2.0 * (1.0 + s2);
  const double plus = (s + w) / den;
  const double minus = (s - w) / den;

  std::vector<double> roots;
  if (plus >= 0.0) roots.push_back(plus);
  if (minus >= 0.0 && minus != plus) roots.push_back(minus);
  if (roots.empty()) {
    throw NoAdmissibleRoot("both roots of the constraint quadratic are negative");
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return roots;
}

std::pair<double, double> solve_attitude(const DimensionlessParams& dp,
                                         double zeta_sq) {
  if (dp.lambda == 0.0) throw DegenerateField("lambda = 0 in attitude solve");
  const double den = dp.lambda * (dp.sigma * dp.sigma + 0.5);
  return {(zeta_sq - dp.sigma) / den, (dp.sigma * zeta_sq + 0.5) / den};
}

SpinSolution solve_spin(const EquilibriumProblem& prob, double xi1, double nu1,
                        double nu3) {
  if (xi1 == 0.0) throw DegenerateAttitude("xi1 = 0: spin solve applies to orbital class only");
  if (std::abs(nu1) < kAttitudeTol) {
    throw DegenerateAttitude("nu1 ~ 0: vertical-dipole case is a distinct class");
  }
  const MidplaneDerivs d = midplane_derivs(prob.field, prob.r0);
  const double drive = prob.body.moment * (nu3 * d.b1 - nu1 * d.b3);
  SpinSolution out;
  out.pi1 = drive / xi1;
  out.pi3 = xi1 / prob.body.alpha() + (nu3 / nu1) * drive / xi1;
  out.xi2_tilde = -prob.body.alpha() * drive / (xi1 * nu1);
  return out;
}

RelativeEquilibrium solve_equilibrium(const EquilibriumProblem& prob) {
  prob.validate();
  const DimensionlessParams dp = dimensionless_params(prob);
  const std::vector<double> roots = solve_zeta_squared(dp);

  RelativeEquilibrium eq;
  eq.r0 = prob.r0;
  eq.lambda = dp.lambda;
  eq.sigma = dp.sigma;
  eq.zeta_sq_roots = roots;
  eq.zeta_sq = roots.front();

  if (eq.zeta_sq == 0.0) {
    eq.cls = EquilibriumClass::kStatic;
    eq.xi1 = 0.0;
    eq.nu1 = 0.0;
    eq.nu3 = 1.0;
    eq.pi1 = eq.pi3 = 0.0;
    eq.xi2_tilde = eq.xi2 = 0.0;
    eq.p0 = 0.0;
  } else {
    eq.cls = EquilibriumClass::kOrbital;
    eq.xi1 = std::sqrt(eq.zeta_sq * prob.g / prob.r0);  // positive by convention
    std::tie(eq.nu1, eq.nu3) = solve_attitude(dp, eq.zeta_sq);
    const SpinSolution spin = solve_spin(prob, eq.xi1, eq.nu1, eq.nu3);
    eq.pi1 = spin.pi1;
    eq.pi3 = spin.pi3;
    eq.xi2_tilde = spin.xi2_tilde;
    eq.p0 = prob.body.mass * eq.xi1 * prob.r0;
    const double pi_dot_nu = eq.pi1 * eq.nu1 + eq.pi3 * eq.nu3;
    eq.xi2 = eq.xi2_tilde - prob.body.beta() * pi_dot_nu;
  }

  eq.residuals = residual_necessary_conditions(eq, prob);
  eq.residual_max = 0.0;
  for (const Vec3& r : eq.residuals) {
    eq.residual_max = std::max(eq.residual_max, r.cwiseAbs().maxCoeff());
  }
  return eq;
}

std::array<Vec3, 4> residual_necessary_conditions(const RelativeEquilibrium& s,
                                                  const EquilibriumProblem& prob) {
  const Vec3 e3 = Vec3::UnitZ();
  const Vec3 x = s.position();
  const Vec3 p = s.momentum();
  const Vec3 nu = s.attitude();
  const Vec3 pi = s.spin();
  const FieldSample f = eval_total(prob.field, x);
  const double m = prob.body.moment;
  const double M = prob.body.mass;

  std::array<Vec3, 4> r;
  r[0] = p / M - s.xi1 * e3.cross(x);
  r[1] = s.xi1 * e3.cross(p) - m * f.jac.transpose() * nu + M * prob.g * e3;
  r[2] = prob.body.alpha() * pi - s.xi1 * e3 + s.xi2_tilde * nu;
  r[3] = nu.cross(s.xi2_tilde * pi - m * f.b);
  return r;
}

}  // namespace orbitron
