#pragma once

#include "orbitron/errors.hpp"

namespace orbitron {

// Axially symmetric rigid dipole: mass, magnetic moment along the symmetry
// axis, transverse and axial moments of inertia.
struct BodyParams {
  double mass = 0.0;     // kg
  double moment = 0.0;   // magnetic moment magnitude, A*m^2
  double i_perp = 0.0;   // I1 = I2, kg*m^2
  double i_axial = 0.0;  // I3, kg*m^2

  double alpha() const { return 1.0 / i_perp; }
  double beta() const { return 1.0 / i_axial - 1.0 / i_perp; }

  void validate() const;
};

// Uniformly magnetized solid disk.
struct DiskGeometry {
  double density = 0.0;             // kg/m^3
  double diameter = 0.0;            // m
  double height = 0.0;              // m
  double residual_induction = 0.0;  // T

  void validate() const;
};

// Standard uniform-disk mass/inertia plus moment = (Br/mu0) * volume.
BodyParams body_from_disk(const DiskGeometry& d);

}  // namespace orbitron
