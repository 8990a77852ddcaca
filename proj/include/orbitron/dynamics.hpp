#pragma once

#include <optional>
#include <vector>

#include "orbitron/equilibrium.hpp"

namespace orbitron {

// Instantaneous dynamical state. The attitude is carried by the magnetic
// moment vector mu = m * nu; the axial inertia never enters the closed
// equations of motion.
struct PhaseState {
  Vec3 x = Vec3::Zero();   // m
  Vec3 p = Vec3::Zero();   // kg*m/s
  Vec3 mu = Vec3::Zero();  // A*m^2
  Vec3 pi = Vec3::Zero();  // kg*m^2/s
  double t = 0.0;          // s
};

enum class IntegratorMethod { kRk4Fixed, kCashKarpAdaptive };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::kRk4Fixed;
  double dt = 0.0;      // fixed step, s (required for kRk4Fixed)
  double rtol = 1e-10;  // adaptive only
  double atol = 1e-12;  // adaptive only
  bool renormalize_mu = false;
  int record_stride = 10;  // trajectory/invariant sampling, in steps
};

struct Invariants {
  double h = 0.0;          // total energy (augmented by nothing)
  double j1 = 0.0;         // axial total angular momentum
  double j2 = 0.0;         // minus the spin projection on the moment axis
  double mu_norm = 0.0;    // |mu|
  double pi_dot_nu = 0.0;  // <pi, nu>
};

struct InvariantTrace {
  Invariants initial;
  std::vector<double> t;
  std::vector<double> h, j1, j2, mu_norm;
  double max_rel_drift_h = 0.0;
  double max_rel_drift_j1 = 0.0;
  double max_rel_drift_j2 = 0.0;
  double max_rel_drift_mu = 0.0;  // relative to the body's moment magnitude
};

enum class Outcome { kBounded, kEscaped, kPoleCollision };

// Optional per-step window checks; the first violated bound terminates the
// trajectory with the matching classification.
struct BoundsSpec {
  double r0 = 0.0;               // reference orbit radius, m
  double max_radial_frac = 0.2;  // | |x_perp| - r0 | < frac * r0
  double max_axial_frac = 0.2;   // |z| < frac * r0
  double pole_guard_mult = 2.0;  // no approach within mult * h of a pole
  double escape_radius_frac = 3.0;  // |x| < frac * r0 overall
};

struct Trajectory {
  std::vector<PhaseState> samples;
  InvariantTrace trace;
  Outcome outcome = Outcome::kBounded;
  double t_end = 0.0;
  double mu_renorm_total = 0.0;  // cumulative |mu| correction when enabled
};

// Right-hand side of the equations of motion:
//   x' = p/M, p' = DB(x)^T mu - M g e3, mu' = (pi x mu)/I_perp, pi' = mu x B.
PhaseState derivative(const PhaseState& s, const EquilibriumProblem& prob);

Invariants invariants(const PhaseState& s, const EquilibriumProblem& prob);

// Integrate for `duration` seconds from s0. Records every cfg.record_stride
// steps (plus the final state). Bound violations terminate early.
Trajectory integrate(const PhaseState& s0, const EquilibriumProblem& prob,
                     const IntegratorConfig& cfg, double duration,
                     const std::optional<BoundsSpec>& bounds = std::nullopt);

// Exact phase point of a solved relative equilibrium.
PhaseState phase_from_equilibrium(const RelativeEquilibrium& eq,
                                  const EquilibriumProblem& prob);

// Rotation by angle about e3, used for equivariance checks and
// rotating-frame deviation measures.
Mat3 rotation_about_e3(double angle);

}  // namespace orbitron
