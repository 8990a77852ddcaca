#pragma once

#include <Eigen/Dense>
#include <array>

#include "orbitron/errors.hpp"

namespace orbitron {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Vacuum permeability, T*m/A. Fixed physical constant, not configurable.
inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;

// Points closer than this to either pole raise PoleSingularity.
inline constexpr double kPoleGuardDistance = 1e-12;  // m

// Two opposite magnetic poles +/-kappa sitting at z = -/+h on the symmetry
// axis. kappa = 0 degenerates to "no poles" (pure compensation field);
// negative pole strength is rejected.
struct OrbitronParams {
  double kappa = 0.0;  // pole strength, A*m
  double h = 0.0;      // pole half-separation, m

  void validate() const;
};

// Axially symmetric field, linear in the coordinates:
//   B = (-x B'/2, -y B'/2, B0 + z B').  Divergence-free by construction.
struct LinearFieldParams {
  double b0 = 0.0;       // uniform axial component, T
  double b_prime = 0.0;  // axial gradient, T/m

  void validate() const;
};

// Total field model: the pole pair plus the linear compensation field.
struct FieldModel {
  OrbitronParams orbitron;
  LinearFieldParams linear;

  void validate() const;
};

// Field value with its first and second spatial derivatives at one point.
// jac(i,k)     = dB_i/dx_k        (symmetric, traceless off the poles)
// hess[i](k,l) = d2B_i/dx_k dx_l  (each slice symmetric; fully symmetric
//                                  in (i,k,l) since B is a potential field)
struct FieldSample {
  Vec3 b = Vec3::Zero();
  Mat3 jac = Mat3::Zero();
  std::array<Mat3, 3> hess{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
};

// Cylindrical-coordinate derivatives of the total field on the midplane
// point (r0, 0, 0), extracted from the Cartesian sample (at that point the
// cylindrical radial direction coincides with +x).
struct MidplaneDerivs {
  double b1 = 0.0;     // radial field component, T
  double b3 = 0.0;     // axial field component, T
  double bz_r = 0.0;   // dBz/dr, T/m
  double bz_z = 0.0;   // dBz/dz (equals b_prime on the midplane), T/m
  double bz_rr = 0.0;  // d2Bz/dr2, T/m^2
  double bz_zz = 0.0;  // d2Bz/dz2, T/m^2
};

struct MaxwellResidual {
  double divergence = 0.0;  // |div B| / ||jac||
  double curl_norm = 0.0;   // ||curl B|| / ||jac||
};

// Pole-pair field value only.
Vec3 eval_orbitron(const OrbitronParams& p, const Vec3& x);

// Compensation field value only.
Vec3 eval_linear(const LinearFieldParams& p, const Vec3& x);

// Total field with closed-form first and second derivatives.
FieldSample eval_total(const FieldModel& m, const Vec3& x);

// Jacobian of the total field at the midplane point r0*e1.
Mat3 midplane_jacobian(const FieldModel& m, double r0);

// The three Hessian slices d2B_i at the midplane point r0*e1.
std::array<Mat3, 3> midplane_hessian(const FieldModel& m, double r0);

// Cylindrical derivative bundle at r0*e1 (single source of truth: derived
// from the Cartesian eval_total sample).
MidplaneDerivs midplane_derivs(const FieldModel& m, double r0);

// Divergence and curl of the analytic Jacobian, relative to its norm.
MaxwellResidual maxwell_residual(const FieldModel& m, const Vec3& x);

}  // namespace orbitron
