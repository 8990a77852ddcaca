#include "orbitron/dynamics.hpp"

#include <cmath>

namespace orbitron {

namespace {

// Stage state for the stepper; t is managed by the caller.
PhaseState axpy(const PhaseState& s, double a, const PhaseState& d) {
  PhaseState out;
  out.x = s.x + a * d.x;
  out.p = s.p + a * d.p;
  out.mu = s.mu + a * d.mu;
  out.pi = s.pi + a * d.pi;
  out.t = s.t;
  return out;
}

bool check_bounds(const PhaseState& s, const BoundsSpec& b, double pole_h,
                  Outcome* outcome) {
  const double rad = std::hypot(s.x.x(), s.x.y());
  const double guard = b.pole_guard_mult * pole_h;
  for (double sgn : {1.0, -1.0}) {
    if ((s.x - Vec3(0, 0, sgn * pole_h)).norm() < guard) {
      *outcome = Outcome::kPoleCollision;
      return false;
    }
  }
  if (std::abs(rad - b.r0) > b.max_radial_frac * b.r0 ||
      std::abs(s.x.z()) > b.max_axial_frac * b.r0 ||
      s.x.norm() > b.escape_radius_frac * b.r0 || !s.x.allFinite()) {
    *outcome = Outcome::kEscaped;
    return false;
  }
  return true;
}

void update_drift(InvariantTrace* tr, const Invariants& q, double moment) {
  auto rel = [](double v, double v0) {
    const double den = std::abs(v0) > 0.0 ? std::abs(v0) : 1.0;
    return std::abs(v - v0) / den;
  };
  tr->max_rel_drift_h = std::max(tr->max_rel_drift_h, rel(q.h, tr->initial.h));
  tr->max_rel_drift_j1 = std::max(tr->max_rel_drift_j1, rel(q.j1, tr->initial.j1));
  tr->max_rel_drift_j2 = std::max(tr->max_rel_drift_j2, rel(q.j2, tr->initial.j2));
  tr->max_rel_drift_mu =
      std::max(tr->max_rel_drift_mu, std::abs(q.mu_norm - moment) / moment);
}

// Cash-Karp embedded 4(5) pair tableau.
constexpr double kA[6][5] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {3.0 / 10, -9.0 / 10, 6.0 / 5},
    {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27},
    {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}};
constexpr double kB5[6] = {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771};
constexpr double kB4[6] = {2825.0 / 27648, 0,           18575.0 / 48384,
                           13525.0 / 55296, 277.0 / 14336, 1.0 / 4};

}  // namespace

PhaseState derivative(const PhaseState& s, const EquilibriumProblem& prob) {
  const FieldSample f = eval_total(prob.field, s.x);
  PhaseState d;
  d.x = s.p / prob.body.mass;
  // grad(mu . B) = DB^T mu; gravity along -e3
  d.p = f.jac.transpose() * s.mu - Vec3(0, 0, prob.body.mass * prob.g);
  d.mu = s.pi.cross(s.mu) / prob.body.i_perp;
  d.pi = s.mu.cross(f.b);
  return d;
}

Invariants invariants(const PhaseState& s, const EquilibriumProblem& prob) {
  const FieldSample f = eval_total(prob.field, s.x);
  const double m = prob.body.moment;
  const Vec3 nu = s.mu / m;
  Invariants q;
  q.pi_dot_nu = s.pi.dot(nu);
  q.h = s.p.squaredNorm() / (2.0 * prob.body.mass) +
        0.5 * prob.body.alpha() * s.pi.squaredNorm() +
        0.5 * prob.body.beta() * q.pi_dot_nu * q.pi_dot_nu - s.mu.dot(f.b) +
        prob.body.mass * prob.g * s.x.z();
  q.j1 = s.pi.z() + s.x.cross(s.p).z();
  q.j2 = -q.pi_dot_nu;
  q.mu_norm = s.mu.norm();
  return q;
}

PhaseState phase_from_equilibrium(const RelativeEquilibrium& eq,
                                  const EquilibriumProblem& prob) {
  PhaseState s;
  s.x = eq.position();
  s.p = eq.momentum();
  s.mu = prob.body.moment * eq.attitude();
  s.pi = eq.spin();
  return s;
}

Mat3 rotation_about_e3(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Trajectory integrate(const PhaseState& s0, const EquilibriumProblem& prob,
                     const IntegratorConfig& cfg, double duration,
                     const std::optional<BoundsSpec>& bounds) {
  Trajectory traj;
  PhaseState s = s0;
  s.t = 0.0;

  traj.trace.initial = invariants(s, prob);
  auto record = [&](const PhaseState& st) {
    const Invariants q = invariants(st, prob);
    traj.samples.push_back(st);
    traj.trace.t.push_back(st.t);
    traj.trace.h.push_back(q.h);
    traj.trace.j1.push_back(q.j1);
    traj.trace.j2.push_back(q.j2);
    traj.trace.mu_norm.push_back(q.mu_norm);
    update_drift(&traj.trace, q, prob.body.moment);
  };
  record(s);

  auto post_step = [&](PhaseState& st) -> bool {
    if (cfg.renormalize_mu) {
      const double n = st.mu.norm();
      traj.mu_renorm_total += std::abs(n - prob.body.moment);
      st.mu *= prob.body.moment / n;
    }
    if (bounds) {
      Outcome o;
      if (!check_bounds(st, *bounds, prob.field.orbitron.h, &o)) {
        traj.outcome = o;
        return false;
      }
    }
    return true;
  };

  if (cfg.method == IntegratorMethod::kRk4Fixed) {
    if (cfg.dt <= 0.0) throw Error("fixed-step integrator requires dt > 0");
    const long n_steps = std::lround(duration / cfg.dt);
    for (long i = 1; i <= n_steps; ++i) {
      const PhaseState k1 = derivative(s, prob);
      const PhaseState k2 = derivative(axpy(s, 0.5 * cfg.dt, k1), prob);
      const PhaseState k3 = derivative(axpy(s, 0.5 * cfg.dt, k2), prob);
      const PhaseState k4 = derivative(axpy(s, cfg.dt, k3), prob);
      s.x += cfg.dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      s.p += cfg.dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
      s.mu += cfg.dt / 6.0 * (k1.mu + 2.0 * k2.mu + 2.0 * k3.mu + k4.mu);
      s.pi += cfg.dt / 6.0 * (k1.pi + 2.0 * k2.pi + 2.0 * k3.pi + k4.pi);
      s.t = i * cfg.dt;
      const bool keep_going = post_step(s);
      if (!keep_going || i % cfg.record_stride == 0 || i == n_steps) record(s);
      if (!keep_going) break;
    }
  } else {
    double dt = duration / 1000.0;
    const double dt_min = duration * 1e-14;
    long accepted = 0;
    while (s.t < duration) {
      dt = std::min(dt, duration - s.t);
      PhaseState k[6];
      k[0] = derivative(s, prob);
      for (int stage = 1; stage < 6; ++stage) {
        PhaseState y = s;
        for (int j = 0; j < stage; ++j) {
          y.x += dt * kA[stage][j] * k[j].x;
          y.p += dt * kA[stage][j] * k[j].p;
          y.mu += dt * kA[stage][j] * k[j].mu;
          y.pi += dt * kA[stage][j] * k[j].pi;
        }
        k[stage] = derivative(y, prob);
      }
      PhaseState y5 = s;
      Eigen::Matrix<double, 12, 1> err = Eigen::Matrix<double, 12, 1>::Zero();
      for (int j = 0; j < 6; ++j) {
        y5.x += dt * kB5[j] * k[j].x;
        y5.p += dt * kB5[j] * k[j].p;
        y5.mu += dt * kB5[j] * k[j].mu;
        y5.pi += dt * kB5[j] * k[j].pi;
        const double db = kB5[j] - kB4[j];
        err.segment<3>(0) += dt * db * k[j].x;
        err.segment<3>(3) += dt * db * k[j].p;
        err.segment<3>(6) += dt * db * k[j].mu;
        err.segment<3>(9) += dt * db * k[j].pi;
      }
      Eigen::Matrix<double, 12, 1> y;
      y << s.x, s.p, s.mu, s.pi;
      double err_ratio = 0.0;
      for (int i = 0; i < 12; ++i) {
        err_ratio = std::max(err_ratio,
                             std::abs(err(i)) / (cfg.atol + cfg.rtol * std::abs(y(i))));
      }
      if (err_ratio <= 1.0) {
        y5.t = s.t + dt;
        s = y5;
        ++accepted;
        const bool keep_going = post_step(s);
        if (!keep_going || accepted % cfg.record_stride == 0) record(s);
        if (!keep_going) break;
      }
      const double factor =
          err_ratio > 0.0 ? 0.9 * std::pow(err_ratio, -0.2) : 5.0;
      dt *= std::clamp(factor, 0.2, 5.0);
      if (dt < dt_min) {
        throw StepFailure("adaptive step size underflow at t = " + std::to_string(s.t));
      }
    }
    if (traj.trace.t.empty() || traj.trace.t.back() != s.t) record(s);
  }

  traj.t_end = s.t;
  return traj;
}

}  // namespace orbitron
