#pragma once

#include <cstdint>
#include <vector>

#include "orbitron/dynamics.hpp"

namespace orbitron {

// Monte Carlo perturbation experiment around a solved equilibrium:
// n_samples trajectories, each dynamical variable perturbed componentwise
// by uniform relative noise, integrated for n_turns orbital periods and
// classified bounded/escaped/pole-collision.
struct SheafConfig {
  int n_samples = 100;
  double rel_perturbation = 0.01;
  double n_turns = 10.0;
  std::uint64_t seed = 0;
  int steps_per_turn = 2000;
  int record_stride = 20;

  // boundedness window (fractions of r0; pole guard in units of h)
  double max_radial_frac = 0.2;
  double max_axial_frac = 0.2;
  double pole_guard_mult = 2.0;
  double escape_radius_frac = 3.0;

  bool renormalize_mu = false;
  bool parallel = true;  // serial path kept as the reference implementation
};

// Deviation is reported two ways: window metrics (radial/axial offsets as
// fractions of r0, the quantities the boundedness window tests) and
// per-variable offsets in the frame co-rotating at the nominal orbit rate.
// The rotating-frame numbers accumulate secular phase slip -- a perturbed
// orbit has a slightly different period -- so they saturate near 2 over
// long horizons while the window metrics stay small.
struct TrajectoryOutcome {
  int index = 0;
  Outcome classification = Outcome::kBounded;
  double turns_completed = 0.0;
  double max_radial_dev = 0.0;  // max | |x_perp| - r0 | / r0
  double max_axial_dev = 0.0;   // max |z| / r0
  double max_dev_x = 0.0;       // rotating-frame, relative to |x*|
  double max_dev_p = 0.0;
  double max_dev_mu = 0.0;
  double max_dev_pi = 0.0;
  double max_rel_drift_h = 0.0;
  PhaseState final_state;
};

struct SheafSummary {
  int n_bounded = 0;
  int n_escaped = 0;
  int n_pole_collision = 0;
  double min_turns_to_escape = 0.0;  // 0 when nothing escaped
  double max_window_dev = 0.0;       // max window metric over bounded samples
  std::vector<TrajectoryOutcome> outcomes;
};

// Deterministic given (seed, config); per-sample substreams make the result
// independent of scheduling, so the parallel and serial paths agree bitwise.
SheafSummary run_sheaf(const RelativeEquilibrium& eq,
                       const EquilibriumProblem& prob, const SheafConfig& cfg);

// Substream-seeded perturbation of an equilibrium phase point. Components
// at the natural zero of their vector are perturbed relative to the
// dominant component magnitude of that vector.
PhaseState perturb_state(const PhaseState& base, double rel_perturbation,
                         std::uint64_t seed, int sample_index);

}  // namespace orbitron
