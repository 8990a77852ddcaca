#pragma once

#include <map>
#include <optional>
#include <string>

#include "orbitron/equilibrium.hpp"
#include "orbitron/sheaf.hpp"

namespace orbitron {

// Reported reference values a run can be compared against (all optional).
struct ReferenceValues {
  std::optional<double> alpha;
  std::optional<double> b1, b3;
  std::optional<double> xi1, xi2_tilde;
  std::optional<double> nu1, nu3;
  std::optional<double> pi1, pi3;

  bool any() const {
    return alpha || b1 || b3 || xi1 || xi2_tilde || nu1 || nu3 || pi1 || pi3;
  }
};

// Flat dotted-key configuration. Numbers in SI units.
//
//   field.kappa, field.h, field.b0, field.b_prime
//   body.mass, body.moment, body.i_perp, body.i_axial
//     -- or -- body.density, body.diameter, body.height, body.residual_induction
//   orbit.r0, orbit.g
//   integrator.method (rk4|adaptive), integrator.steps_per_turn,
//   integrator.rtol, integrator.atol, integrator.renormalize_mu,
//   integrator.record_stride
//   sheaf.samples, sheaf.rel_perturbation, sheaf.turns, sheaf.seed,
//   sheaf.max_radial_frac, sheaf.max_axial_frac, sheaf.pole_guard_mult,
//   sheaf.escape_radius_frac, sheaf.parallel
//   reference.alpha, reference.b1, reference.b3, reference.xi1,
//   reference.xi2_tilde, reference.nu1, reference.nu3, reference.pi1,
//   reference.pi3
//   output.dir
struct RunConfig {
  FieldModel field;
  double r0 = 0.0;
  double g = 9.81;

  // exactly one of the two body descriptions must be present
  std::optional<BodyParams> body_explicit;
  std::optional<DiskGeometry> body_disk;

  IntegratorMethod integrator_method = IntegratorMethod::kRk4Fixed;
  int steps_per_turn = 2000;
  double rtol = 1e-10;
  double atol = 1e-12;
  bool renormalize_mu = false;
  int record_stride = 10;

  SheafConfig sheaf;
  ReferenceValues reference;
  std::string output_dir;

  BodyParams body() const;  // resolves the disk geometry when given
  EquilibriumProblem problem() const;
  void validate() const;
};

// Parse `key = value` lines; '#' starts a comment. Unknown keys and
// malformed lines raise ConfigError with the line number.
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);

// Apply a single "key=value" override on top of a parsed config.
void apply_override(RunConfig* cfg, const std::string& assignment);

// The underlying key/value view of a config (used for echo in reports).
std::map<std::string, std::string> config_keys(const RunConfig& cfg);

}  // namespace orbitron
