#include "orbitron/body.hpp"

#include <cmath>

#include "orbitron/fields.hpp"

namespace orbitron {

void BodyParams::validate() const {
  if (mass <= 0.0) throw Error("body mass must be > 0");
  if (moment <= 0.0) throw Error("magnetic moment must be > 0");
  if (i_perp <= 0.0 || i_axial <= 0.0) throw Error("moments of inertia must be > 0");
  if (i_axial > 2.0 * i_perp) {
    throw Error("i_axial > 2*i_perp is not realizable by a rigid body");
  }
}

void DiskGeometry::validate() const {
  if (density <= 0.0 || diameter <= 0.0 || height <= 0.0 ||
      residual_induction <= 0.0) {
    throw Error("disk geometry parameters must be > 0");
  }
}

BodyParams body_from_disk(const DiskGeometry& d) {
  d.validate();
  const double r = 0.5 * d.diameter;
  const double volume = 3.14159265358979323846 * r * r * d.height;
  BodyParams b;
  b.mass = d.density * volume;
  b.i_axial = 0.5 * b.mass * r * r;
  b.i_perp = b.mass * (3.0 * r * r + d.height * d.height) / 12.0;
  b.moment = d.residual_induction / kMu0 * volume;
  b.validate();
  return b;
}

}  // namespace orbitron
