#include "orbitron/fields.hpp"

#include <cmath>

namespace orbitron {

namespace {

// One pole term: s = +/-1 selects the pole at z = s*h carrying charge
// -s*kappa, i.e. B_s = -(mu0/4pi) * s * kappa * u / |u|^3 with u = x - s*h*e3.
struct PoleTerm {
  Vec3 u;
  double c;  // -(mu0/4pi) * s * kappa
};

PoleTerm pole_term(const OrbitronParams& p, const Vec3& x, double s) {
  Vec3 u = x - Vec3(0.0, 0.0, s * p.h);
  const double r = u.norm();
  if (r <= kPoleGuardDistance) {
    throw PoleSingularity("field evaluation within guard distance of pole at z = " +
                          std::to_string(s * p.h));
  }
  return {u, -(kMu0 / (4.0 * 3.14159265358979323846)) * s * p.kappa};
}

}  // namespace

void OrbitronParams::validate() const {
  if (kappa < 0.0) throw Error("orbitron pole strength must be >= 0");
  if (h <= 0.0) throw Error("orbitron pole half-separation must be > 0");
}

void LinearFieldParams::validate() const {
  if (!std::isfinite(b0) || !std::isfinite(b_prime)) {
    throw Error("linear field parameters must be finite");
  }
}

void FieldModel::validate() const {
  orbitron.validate();
  linear.validate();
}

Vec3 eval_orbitron(const OrbitronParams& p, const Vec3& x) {
  Vec3 b = Vec3::Zero();
  if (p.kappa == 0.0) return b;
  for (double s : {1.0, -1.0}) {
    const PoleTerm t = pole_term(p, x, s);
    const double r = t.u.norm();
    b += t.c * t.u / (r * r * r);
  }
  return b;
}

Vec3 eval_linear(const LinearFieldParams& p, const Vec3& x) {
  return {-0.5 * p.b_prime * x.x(), -0.5 * p.b_prime * x.y(),
          p.b0 + p.b_prime * x.z()};
}

FieldSample eval_total(const FieldModel& m, const Vec3& x) {
  FieldSample out;
  out.b = eval_linear(m.linear, x);
  out.jac = Vec3(-0.5 * m.linear.b_prime, -0.5 * m.linear.b_prime,
                 m.linear.b_prime)
                .asDiagonal();
  // hess of the linear part is identically zero.

  if (m.orbitron.kappa != 0.0) {
    for (double s : {1.0, -1.0}) {
      const PoleTerm t = pole_term(m.orbitron, x, s);
      const Vec3& u = t.u;
      const double r2 = u.squaredNorm();
      const double r = std::sqrt(r2);
      const double r3 = r * r2;
      const double r5 = r3 * r2;
      const double r7 = r5 * r2;

      out.b += t.c * u / r3;
      out.jac += t.c * (Mat3::Identity() / r3 - 3.0 * u * u.transpose() / r5);
      // d2(u_i/r^3) = -3(d_ik u_l + d_il u_k + d_kl u_i)/r^5 + 15 u_i u_k u_l / r^7
      for (int i = 0; i < 3; ++i) {
        Mat3 hi = 15.0 * u(i) * u * u.transpose() / r7;
        hi -= 3.0 * u(i) * Mat3::Identity() / r5;
        for (int k = 0; k < 3; ++k) {
          hi(i, k) -= 3.0 * u(k) / r5;
          hi(k, i) -= 3.0 * u(k) / r5;
        }
        out.hess[i] += t.c * hi;
      }
    }
  }
  return out;
}

Mat3 midplane_jacobian(const FieldModel& m, double r0) {
  return eval_total(m, Vec3(r0, 0.0, 0.0)).jac;
}

std::array<Mat3, 3> midplane_hessian(const FieldModel& m, double r0) {
  return eval_total(m, Vec3(r0, 0.0, 0.0)).hess;
}

MidplaneDerivs midplane_derivs(const FieldModel& m, double r0) {
  const FieldSample s = eval_total(m, Vec3(r0, 0.0, 0.0));
  MidplaneDerivs d;
  d.b1 = s.b.x();
  d.b3 = s.b.z();
  d.bz_r = s.jac(2, 0);
  d.bz_z = s.jac(2, 2);
  d.bz_rr = s.hess[2](0, 0);
  d.bz_zz = s.hess[2](2, 2);
  return d;
}

MaxwellResidual maxwell_residual(const FieldModel& m, const Vec3& x) {
  const Mat3 j = eval_total(m, x).jac;
  const double scale = j.norm();
  MaxwellResidual r;
  if (scale == 0.0) return r;
  r.divergence = std::abs(j.trace()) / scale;
  const Vec3 curl(j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1));
  r.curl_norm = curl.norm() / scale;
  return r;
}

}  // namespace orbitron
