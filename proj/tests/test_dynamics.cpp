#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitron/dynamics.hpp"
#include "orbitron/sheaf.hpp"
#include "support/oracles.hpp"

using namespace orbitron;
using orbitron::testing::TestRng;

namespace {

struct Solved {
  EquilibriumProblem prob;
  RelativeEquilibrium eq;
  PhaseState state;
  double period;
};

Solved bundled() {
  Solved s;
  s.prob = orbitron::testing::bundled_stable_problem();
  s.eq = solve_equilibrium(s.prob);
  s.state = phase_from_equilibrium(s.eq, s.prob);
  s.period = 2.0 * M_PI / s.eq.xi1;
  return s;
}

PhaseState random_state(TestRng* rng, const EquilibriumProblem& prob) {
  PhaseState s;
  s.x = Vec3(rng->uniform(0.05, 0.15), rng->uniform(-0.05, 0.05),
             rng->uniform(-0.03, 0.03));
  s.p = rng->vec(-0.02, 0.02);
  Vec3 nu = rng->vec(-1, 1).normalized();
  s.mu = prob.body.moment * nu;
  s.pi = rng->vec(-0.005, 0.005);
  return s;
}

}  // namespace

TEST_CASE("equations of motion at the equilibrium: rigid rotation") {
  const Solved s = bundled();
  const PhaseState d = derivative(s.state, s.prob);
  const Vec3 e3 = Vec3::UnitZ();
  const double tol = 1e-12 * s.eq.xi1;
  CHECK((d.x - s.eq.xi1 * e3.cross(s.state.x)).norm() < tol * s.state.x.norm());
  CHECK((d.p - s.eq.xi1 * e3.cross(s.state.p)).norm() < tol * s.state.p.norm());
  CHECK((d.mu - s.eq.xi1 * e3.cross(s.state.mu)).norm() < tol * s.state.mu.norm());
  CHECK((d.pi - s.eq.xi1 * e3.cross(s.state.pi)).norm() <
        1e-10 * s.eq.xi1 * s.state.pi.norm() + 1e-18);
}

TEST_CASE("aligned moment and spin: no torque, no precession") {
  const Solved s = bundled();
  PhaseState st;
  st.x = Vec3(0.2, 0.0, 0.0);
  const Vec3 b = eval_total(s.prob.field, st.x).b;
  st.mu = s.prob.body.moment * b.normalized();
  st.pi = 0.003 * b.normalized();
  st.p = Vec3(0, 0.01, 0);
  const PhaseState d = derivative(st, s.prob);
  CHECK(d.mu.norm() < 1e-18);
  CHECK(d.pi.norm() < 1e-16 * s.prob.body.moment * b.norm());
}

TEST_CASE("the moment magnitude and spin projection are conserved pointwise") {
  const Solved s = bundled();
  TestRng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const PhaseState st = random_state(&rng, s.prob);
    const PhaseState d = derivative(st, s.prob);
    // <mu', mu> = 0 by the cross-product structure
    CHECK(std::abs(d.mu.dot(st.mu)) <
          1e-12 * d.mu.norm() * st.mu.norm() + 1e-300);
    // d/dt <pi, nu> = <mu x B, nu> + <pi, (pi x nu)/I> vanishes identically
    const Vec3 nu = st.mu / s.prob.body.moment;
    const Vec3 b = eval_total(s.prob.field, st.x).b;
    const double val = st.mu.cross(b).dot(nu) +
                       st.pi.dot(st.pi.cross(nu)) / s.prob.body.i_perp;
    const double scale = st.mu.norm() * b.norm() +
                         st.pi.squaredNorm() / s.prob.body.i_perp;
    CHECK(std::abs(val) < 1e-12 * scale);
  }
}

TEST_CASE("invariants: rest state value, sign conventions, axial symmetry") {
  const Solved s = bundled();
  SUBCASE("rest with aligned moment") {
    PhaseState st;
    st.x = Vec3(0.15, 0.0, 0.02);
    const Vec3 b = eval_total(s.prob.field, st.x).b;
    st.mu = s.prob.body.moment * b.normalized();
    const Invariants q = invariants(st, s.prob);
    const double expected = -s.prob.body.moment * b.norm() +
                            s.prob.body.mass * s.prob.g * st.x.z();
    CHECK(q.h == doctest::Approx(expected).epsilon(1e-14));
    CHECK(q.j2 == -q.pi_dot_nu);
  }
  SUBCASE("rotation about e3 leaves h, J1, J2 unchanged") {
    TestRng rng(23);
    for (int i = 0; i < 10; ++i) {
      const PhaseState st = random_state(&rng, s.prob);
      const Invariants q0 = invariants(st, s.prob);
      const Mat3 rot = rotation_about_e3(rng.uniform(0, 2 * M_PI));
      PhaseState rt;
      rt.x = rot * st.x;
      rt.p = rot * st.p;
      rt.mu = rot * st.mu;
      rt.pi = rot * st.pi;
      const Invariants q1 = invariants(rt, s.prob);
      CHECK(q1.h == doctest::Approx(q0.h).epsilon(1e-12));
      CHECK(q1.j1 == doctest::Approx(q0.j1).epsilon(1e-12));
      CHECK(q1.j2 == doctest::Approx(q0.j2).epsilon(1e-12));
    }
  }
}

TEST_CASE("integrating the exact equilibrium holds the orbit") {
  const Solved s = bundled();
  IntegratorConfig cfg;
  cfg.dt = s.period / 2000.0;
  cfg.record_stride = 50;
  const Trajectory traj = integrate(s.state, s.prob, cfg, 10.0 * s.period);
  CHECK(traj.outcome == Outcome::kBounded);
  for (const PhaseState& p : traj.samples) {
    CHECK(std::abs(std::hypot(p.x.x(), p.x.y()) - s.eq.r0) / s.eq.r0 < 1e-6);
  }
  CHECK(traj.trace.max_rel_drift_h < 1e-8);
  CHECK(traj.trace.max_rel_drift_j1 < 1e-8);
  CHECK(traj.trace.max_rel_drift_j2 < 1e-8);
  CHECK(traj.trace.max_rel_drift_mu < 1e-10);
}

TEST_CASE("invariant drift decreases monotonically under step halving") {
  const Solved s = bundled();
  PhaseState st = perturb_state(s.state, 0.01, 7, 0);
  auto drift = [&](int per_turn) {
    IntegratorConfig cfg;
    cfg.dt = s.period / per_turn;
    cfg.record_stride = 1000000;  // drift is tracked every step regardless
    const Trajectory t = integrate(st, s.prob, cfg, 5.0 * s.period);
    return t.trace.max_rel_drift_h;
  };
  const double d1 = drift(500), d2 = drift(1000), d3 = drift(2000);
  CHECK(d1 > d2);
  CHECK(d2 > d3);
  CHECK(d1 / d2 > 8.0);  // at least the nominal fourth order
}

TEST_CASE("rotation equivariance of the flow") {
  const Solved s = bundled();
  PhaseState st = perturb_state(s.state, 0.02, 11, 3);
  const Mat3 rot = rotation_about_e3(1.234);
  PhaseState rotated;
  rotated.x = rot * st.x;
  rotated.p = rot * st.p;
  rotated.mu = rot * st.mu;
  rotated.pi = rot * st.pi;

  IntegratorConfig cfg;
  cfg.dt = s.period / 2000.0;
  cfg.record_stride = 1 << 30;
  const PhaseState a = integrate(st, s.prob, cfg, s.period).samples.back();
  const PhaseState b = integrate(rotated, s.prob, cfg, s.period).samples.back();
  CHECK((rot * a.x - b.x).norm() < 1e-9 * b.x.norm());
  CHECK((rot * a.p - b.p).norm() < 1e-9 * b.p.norm());
  CHECK((rot * a.mu - b.mu).norm() < 1e-9 * b.mu.norm());
  CHECK((rot * a.pi - b.pi).norm() < 1e-9 * b.pi.norm() + 1e-16);
}

TEST_CASE("moment renormalization is off by default and logged when on") {
  const Solved s = bundled();
  PhaseState st = perturb_state(s.state, 0.05, 3, 1);
  IntegratorConfig cfg;
  cfg.dt = s.period / 500.0;
  cfg.record_stride = 100;
  const Trajectory plain = integrate(st, s.prob, cfg, s.period);
  CHECK(plain.mu_renorm_total == 0.0);
  cfg.renormalize_mu = true;
  const Trajectory renorm = integrate(st, s.prob, cfg, s.period);
  CHECK(renorm.samples.back().mu.norm() ==
        doctest::Approx(s.prob.body.moment).epsilon(1e-14));
  CHECK(renorm.mu_renorm_total >= 0.0);
}

TEST_CASE("adaptive stepping reproduces the fixed-step trajectory") {
  const Solved s = bundled();
  PhaseState st = perturb_state(s.state, 0.01, 19, 2);
  IntegratorConfig fixed;
  fixed.dt = s.period / 4000.0;
  fixed.record_stride = 1 << 30;
  const PhaseState a = integrate(st, s.prob, fixed, s.period).samples.back();

  IntegratorConfig adaptive;
  adaptive.method = IntegratorMethod::kCashKarpAdaptive;
  adaptive.rtol = 1e-11;
  adaptive.atol = 1e-14;
  adaptive.record_stride = 1 << 30;
  const Trajectory tb = integrate(st, s.prob, adaptive, s.period);
  const PhaseState b = tb.samples.back();
  CHECK(b.t == doctest::Approx(s.period).epsilon(1e-12));
  CHECK((a.x - b.x).norm() < 1e-7 * b.x.norm());
  CHECK((a.mu - b.mu).norm() < 1e-7 * b.mu.norm());
}

TEST_CASE("bound violations classify and terminate") {
  const Solved s = bundled();
  SUBCASE("escape through the radial window") {
    PhaseState st = s.state;
    st.p *= 1.5;  // far too fast: leaves the radial window
    IntegratorConfig cfg;
    cfg.dt = s.period / 2000.0;
    BoundsSpec bounds;
    bounds.r0 = s.eq.r0;
    bounds.pole_guard_mult = 1.25;  // below the orbit's own pole clearance
    const Trajectory t = integrate(st, s.prob, cfg, 10.0 * s.period, bounds);
    CHECK(t.outcome == Outcome::kEscaped);
    CHECK(t.t_end < 10.0 * s.period);
  }
  SUBCASE("a pole guard wider than the orbit trips immediately") {
    IntegratorConfig cfg;
    cfg.dt = s.period / 2000.0;
    BoundsSpec bounds;
    bounds.r0 = s.eq.r0;
    bounds.pole_guard_mult = 10.0;
    const Trajectory t = integrate(s.state, s.prob, cfg, s.period, bounds);
    CHECK(t.outcome == Outcome::kPoleCollision);
  }
}
