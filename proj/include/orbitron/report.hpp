#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "orbitron/config.hpp"
#include "orbitron/stability.hpp"

namespace orbitron {

using Json = nlohmann::json;

// Machine-readable reports. Every emitter has a matching parser so a report
// can be round-tripped and re-validated.
Json equilibrium_to_json(const RelativeEquilibrium& eq);
RelativeEquilibrium equilibrium_from_json(const Json& j);
void validate_equilibrium_report(const RelativeEquilibrium& eq);

Json stability_to_json(const StabilityReport& rep);
StabilityReport stability_from_json(const Json& j);
void validate_stability_report(const StabilityReport& rep);

Json sheaf_to_json(const SheafSummary& s);
SheafSummary sheaf_from_json(const Json& j);
void validate_sheaf_report(const SheafSummary& s);

Json field_sample_to_json(const FieldSample& s, const Vec3& x,
                          const MaxwellResidual& maxwell);

// Comparison of a solved run against configured reference values plus the
// solvability diagnostics (lambda, sigma, real-root condition, derived-body
// mismatches). Emitted by full-report; always populated even when the solve
// fails.
Json reference_comparison(const RunConfig& cfg);

// Delimited-text trajectory: one row per recorded sample,
// columns t x1 x2 x3 p1 p2 p3 mu1 mu2 mu3 pi1 pi2 pi3 h J1 J2.
void write_trajectory(std::ostream& out, const Trajectory& traj,
                      const EquilibriumProblem& prob);

std::string outcome_name(Outcome o);

}  // namespace orbitron
