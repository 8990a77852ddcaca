#pragma once

#include <array>
#include <string>

#include "orbitron/equilibrium.hpp"

namespace orbitron {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat4 = Eigen::Matrix4d;

// Variation ordering used throughout this module:
//   indices 0-2: dx, 3-5: dA (right-trivialized attitude variation,
//   d(nu) = dA x nu), 6-8: dp, 9-11: dpi.
inline constexpr int kVarDim = 12;

// Second variation of the augmented energy at a relative equilibrium,
// assembled in the inertial frame with the effective spin multiplier held
// constant. The quadratic form value on a variation v is v^T matrix v.
struct SecondVariation {
  Mat12 matrix = Mat12::Zero();
  // Max residual of the necessary conditions at the expansion point; a
  // nonzero value beyond solver tolerance means the form is not taken at a
  // critical point and its restriction is not meaningful.
  double critical_point_residual = 0.0;
  bool at_critical_point = true;
};

SecondVariation second_variation(const RelativeEquilibrium& eq,
                                 const EquilibriumProblem& prob);

// The four linear functionals cut out the admissible subspace:
// rows 0-1 level-set tangency, rows 2-3 transversality to the symmetry orbit.
Eigen::Matrix<double, 4, kVarDim> constraint_functionals(const RelativeEquilibrium& eq);

// Basis of the admissible subspace, one column per free variation in the
// order (dpi2, dx2, dA1, dpi1, dx3, dx1, dA2, dp3); dependent components
// (dp1, dA3, dpi3, dp2) are filled by the constraint elimination.
// Throws DegenerateAttitude when |nu3| < 1e-9.
Eigen::Matrix<double, kVarDim, 8> admissible_basis(const RelativeEquilibrium& eq);

// Restriction of the second variation to the admissible subspace. The form
// decouples into a 3x3 block q1 (dpi2, dx2, dA1), a 4x4 block q2
// (dpi1, dx3, dx1, dA2) and the trivial dp3 contribution 1/M.
struct ReducedForm {
  Mat3 q1 = Mat3::Zero();
  Mat4 q2 = Mat4::Zero();
  double dp3_coeff = 0.0;
  // max |cross-block entry| / max |diagonal-block entry|
  double block_residual = 0.0;
};

// Projection route: B^T (second variation) B.
// Throws BlockStructureViolation when the cross-block residual exceeds 1e-10.
ReducedForm reduce(const SecondVariation& sv,
                   const Eigen::Matrix<double, kVarDim, 8>& basis);

// Closed-form route: the same two blocks written directly through the
// midplane field derivatives and the solved equilibrium quantities.
// Independent of the 12x12 assembly; the two routes must agree.
ReducedForm closed_form_reduced(const RelativeEquilibrium& eq,
                                const EquilibriumProblem& prob);

enum class Verdict { kStable, kUnstable, kIndeterminate };

std::string to_string(Verdict v);

// Tri-state comparison guard: minors of order k are compared against
// +/- kMinorGuard * ||Q||_F^k, eigenvalues against +/- kMinorGuard * ||Q||_F.
inline constexpr double kMinorGuard = 1e-8;

// Scalar closed-form positivity conditions, each with its own value and
// tri-state. Names describe the physical content, matching report keys.
struct AnalyticConditions {
  double orbital_stiffness = 0.0;     // 3 M xi1^2 - m nu3 Bz_r / r0
  double q1_det_condition = 0.0;      // 3 M xi1^2 r0 - m nu3 Bz_r + m nu1 B'/2
  double moment_alignment = 0.0;      // B1 / nu1
  double axial_curvature = 0.0;       // -m nu3 Bz_zz
  double radial_coupling = 0.0;       // see closed_form_reduced docs
  bool radial_coupling_defined = true;  // false when Bz_zz ~ 0 (boundary)

  // Alignment identity <nu, mB - k pi> - k^2/alpha with k the effective
  // multiplier (lhs_effective) vs the bare multiplier (lhs_bare); the
  // effective variant equals rhs = m B1 / nu1 at a solved equilibrium.
  double alignment_identity_lhs_effective = 0.0;
  double alignment_identity_lhs_bare = 0.0;
  double alignment_identity_rhs = 0.0;

  Verdict orbital_stiffness_state = Verdict::kIndeterminate;
  Verdict q1_det_state = Verdict::kIndeterminate;
  Verdict moment_alignment_state = Verdict::kIndeterminate;
  Verdict axial_curvature_state = Verdict::kIndeterminate;
  Verdict radial_coupling_state = Verdict::kIndeterminate;

  // Conjunction of moment_alignment and q1_det_condition; equals the
  // Sylvester verdict on q1 at a solved equilibrium.
  Verdict q1_analytic_verdict = Verdict::kIndeterminate;
};

AnalyticConditions analytic_conditions(const RelativeEquilibrium& eq,
                                       const EquilibriumProblem& prob);

struct StabilityReport {
  std::array<double, 3> q1_minors{};
  std::array<double, 4> q2_minors{};
  std::array<bool, 7> diagonal_positive{};  // necessary conditions
  Verdict q1_verdict = Verdict::kIndeterminate;
  Verdict q2_verdict = Verdict::kIndeterminate;
  Verdict verdict = Verdict::kIndeterminate;
  Verdict eigen_verdict = Verdict::kIndeterminate;
  bool oracle_agreement = false;
  double q1_min_eigenvalue = 0.0;
  double q2_min_eigenvalue = 0.0;
  double block_residual = 0.0;
  // Max |closed-form entry - projected entry| / block scale across q1, q2.
  double route_mismatch = 0.0;
  AnalyticConditions conditions;
  bool analytic_matches_minors = false;
};

// Leading-minor test with the eigenvalue oracle run alongside.
// Populates everything except `conditions`/`analytic_matches_minors`.
StabilityReport sylvester(const ReducedForm& form);

// Full pipeline: second variation -> admissible basis -> reduction ->
// Sylvester + eigenvalue oracle + closed-form cross-checks.
// Requires an orbital-class equilibrium.
StabilityReport stability_report(const RelativeEquilibrium& eq,
                                 const EquilibriumProblem& prob);

}  // namespace orbitron
