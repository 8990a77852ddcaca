#pragma once

// Test-only oracles: finite-difference derivatives, the augmented energy
// evaluated along phase-space curves, and an independent random-problem
// generator. Nothing here reuses the derivative or reduction code paths it
// is meant to check.

#include <cmath>
#include <cstdint>
#include <optional>

#include "orbitron/equilibrium.hpp"
#include "orbitron/stability.hpp"

namespace orbitron::testing {

// -------- deterministic portable RNG --------
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed * 0x9e3779b97f4a7c15ULL + 0xabcdULL) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) / 9007199254740992.0;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  Vec3 vec(double lo, double hi) {
    return Vec3(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  }
};

// -------- finite differences of the field --------
// Fourth-order central stencils with the step scaled by the local field
// length (distance to the nearest pole). The uniform field component puts
// an absolute rounding floor under the differenced values while the
// pole-field derivatives decay like 1/r^(3+n), so coordinate-magnitude
// step rules bottom out above 1e-6 relative error in the far field;
// 0.6% of the pole distance keeps both truncation and rounding near 1e-7
// or below everywhere off the guard balls.
inline double fd_step(const FieldModel& m, const Vec3& x) {
  if (m.orbitron.kappa > 0.0) {
    const double d = std::min((x - Vec3(0, 0, m.orbitron.h)).norm(),
                              (x + Vec3(0, 0, m.orbitron.h)).norm());
    return 0.006 * d;
  }
  return std::pow(2.2e-16, 0.2) * std::max(0.1 * x.norm(), 1e-3);
}

template <typename F>
auto fd_central4(const F& f, double step) -> decltype(f(0.0)) {
  using R = decltype(f(0.0));
  const R fp2 = f(2.0 * step);
  const R fp1 = f(step);
  const R fm1 = f(-step);
  const R fm2 = f(-2.0 * step);
  return R((-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * step));
}

inline Mat3 fd_jacobian(const FieldModel& m, const Vec3& x) {
  Mat3 j;
  for (int k = 0; k < 3; ++k) {
    const double step = fd_step(m, x);
    const Vec3 col = fd_central4(
        [&](double s) -> Vec3 {
          Vec3 xs = x;
          xs(k) += s;
          return eval_total(m, xs).b;
        },
        step);
    j.col(k) = col;
  }
  return j;
}

inline std::array<Mat3, 3> fd_hessian(const FieldModel& m, const Vec3& x) {
  std::array<Mat3, 3> h{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (int l = 0; l < 3; ++l) {
    const double step = fd_step(m, x);
    const Mat3 d = fd_central4(
        [&](double s) -> Mat3 {
          Vec3 xs = x;
          xs(l) += s;
          return eval_total(m, xs).jac;
        },
        step);
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) h[i](k, l) = d(i, k);
    }
  }
  return h;
}

// -------- augmented energy and its directional second derivative --------
inline Vec3 rodrigues(const Vec3& axis_times_angle, const Vec3& v) {
  const double angle = axis_times_angle.norm();
  if (angle < 1e-300) return v;
  const Vec3 n = axis_times_angle / angle;
  return v * std::cos(angle) + n.cross(v) * std::sin(angle) +
         n * n.dot(v) * (1.0 - std::cos(angle));
}

struct Multipliers {
  double xi1 = 0.0;
  double xi2 = 0.0;  // bare multiplier (held constant along test curves)
};

inline double augmented_energy(const EquilibriumProblem& prob, const Vec3& x,
                               const Vec3& nu, const Vec3& p, const Vec3& pi,
                               const Multipliers& mult) {
  const FieldSample f = eval_total(prob.field, x);
  const double spin_proj = pi.dot(nu);
  return p.squaredNorm() / (2.0 * prob.body.mass) +
         0.5 * prob.body.alpha() * pi.squaredNorm() +
         0.5 * prob.body.beta() * spin_proj * spin_proj -
         prob.body.moment * f.b.dot(nu) + prob.body.mass * prob.g * x.z() -
         mult.xi1 * (pi.z() + x.cross(p).z()) + mult.xi2 * spin_proj;
}

// d^2/de^2 of the augmented energy along the curve that moves x, p, pi
// linearly in the 12-dim variation v and rotates the attitude by the
// exponential of e * dA. Central second difference.
inline double fd_second_derivative(const EquilibriumProblem& prob,
                                   const RelativeEquilibrium& eq,
                                   const Eigen::Matrix<double, 12, 1>& v,
                                   double eps = 3e-4) {
  const Multipliers mult{eq.xi1, eq.xi2};
  const Vec3 dx = v.segment<3>(0), da = v.segment<3>(3), dp = v.segment<3>(6),
             dq = v.segment<3>(9);
  auto value = [&](double e) {
    return augmented_energy(prob, eq.position() + e * dx,
                            rodrigues(e * da, eq.attitude()),
                            eq.momentum() + e * dp, eq.spin() + e * dq, mult);
  };
  return (value(eps) - 2.0 * value(0.0) + value(-eps)) / (eps * eps);
}

// First variation of the spin projection <pi, nu> in direction v; vanishes
// on the admissible subspace.
inline double spin_projection_variation(const RelativeEquilibrium& eq,
                                        const Eigen::Matrix<double, 12, 1>& v) {
  const Vec3 da = v.segment<3>(3), dq = v.segment<3>(9);
  return dq.dot(eq.attitude()) + eq.attitude().cross(eq.spin()).dot(da);
}

// -------- independent solvable-problem generator --------
// Draws the dimensionless shape first and constructs the trap to match, so
// every returned problem admits a real equilibrium. The discriminant
// fraction controls the branch character: below 1 the dipole tilts against
// the radial field component (nu1 opposite to B1), above 1 it tilts with it.
inline EquilibriumProblem random_solvable_problem(TestRng* rng,
                                                  double rho_lo = 1.3,
                                                  double rho_hi = 1.6,
                                                  double disc_frac_lo = 0.1,
                                                  double disc_frac_hi = 0.95) {
  const double two_pi_factor = kMu0 / (2.0 * 3.14159265358979323846);
  for (;;) {
    EquilibriumProblem prob;
    prob.g = 9.81;
    const double h = rng->uniform(0.02, 0.10);
    const double r0 = rng->uniform(rho_lo, rho_hi) * h;
    prob.field.orbitron.h = h;
    prob.r0 = r0;
    prob.field.linear.b0 = rng->uniform(0.005, 0.2);
    prob.body.mass = rng->uniform(0.002, 0.02);
    prob.body.moment = rng->uniform(5.0, 50.0) * prob.body.mass;
    prob.body.i_perp = 1.0 / std::pow(10.0, rng->uniform(2.0, 6.0));
    prob.body.i_axial = rng->uniform(0.8, 1.8) * prob.body.i_perp;
    const double sigma = rng->uniform(0.3, 6.0);
    const double disc = rng->uniform(disc_frac_lo, disc_frac_hi) * sigma * sigma;
    const double lambda = std::sqrt((1.0 + disc) / (1.0 + sigma * sigma));
    const double bp = lambda * prob.body.mass * prob.g / prob.body.moment;
    prob.field.linear.b_prime = bp;
    const double s = r0 * r0 + h * h;
    const double kappa =
        sigma * bp * std::pow(s, 2.5) / (3.0 * two_pi_factor * h * r0);
    if (kappa <= 0.0 || kappa > 5e4) continue;
    prob.field.orbitron.kappa = kappa;
    return prob;
  }
}

// A solved orbital equilibrium with reasonable conditioning, for stability
// sweeps.
inline std::optional<RelativeEquilibrium> try_solve_conditioned(
    const EquilibriumProblem& prob) {
  try {
    RelativeEquilibrium eq = solve_equilibrium(prob);
    if (eq.cls != EquilibriumClass::kOrbital) return std::nullopt;
    if (std::abs(eq.nu1) < 0.01) return std::nullopt;
    return eq;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// The bundled stable configuration (kept in sync with configs/stable.conf;
// regenerate with `orbitron search --kind stable --seed 20250811`).
inline EquilibriumProblem bundled_stable_problem() {
  EquilibriumProblem prob;
  prob.field.orbitron.kappa = 1554.4208519070776;
  prob.field.orbitron.h = 0.04334409356895845;
  prob.field.linear.b0 = 0.17571738428653899;
  prob.field.linear.b_prime = 0.33460602885869184;
  prob.body.mass = 0.007647547672186011;
  prob.body.moment = 0.20344123455738819;
  prob.body.i_perp = 0.00012060644717069422;
  prob.body.i_axial = 0.00013027791823021887;
  prob.r0 = 0.058597465069272742;
  prob.g = 9.81;
  return prob;
}

}  // namespace orbitron::testing
