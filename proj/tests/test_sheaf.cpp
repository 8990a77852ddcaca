#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitron/sheaf.hpp"
#include "support/oracles.hpp"

using namespace orbitron;

namespace {

struct Solved {
  EquilibriumProblem prob;
  RelativeEquilibrium eq;
};

Solved bundled() {
  Solved s;
  s.prob = orbitron::testing::bundled_stable_problem();
  s.eq = solve_equilibrium(s.prob);
  return s;
}

SheafConfig fast_config() {
  SheafConfig cfg;
  cfg.n_samples = 12;
  cfg.rel_perturbation = 0.01;
  cfg.n_turns = 3.0;
  cfg.steps_per_turn = 500;
  cfg.seed = 42;
  cfg.pole_guard_mult = 1.25;  // the bundled orbit sits at r0 ~ 1.35 h
  return cfg;
}

bool outcomes_identical(const SheafSummary& a, const SheafSummary& b) {
  if (a.outcomes.size() != b.outcomes.size()) return false;
  for (size_t i = 0; i < a.outcomes.size(); ++i) {
    const TrajectoryOutcome &x = a.outcomes[i], &y = b.outcomes[i];
    if (x.classification != y.classification) return false;
    if (x.turns_completed != y.turns_completed) return false;
    if (x.max_radial_dev != y.max_radial_dev) return false;
    if (x.max_dev_p != y.max_dev_p) return false;
    if (x.final_state.x != y.final_state.x) return false;
    if (x.final_state.pi != y.final_state.pi) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("perturbation semantics") {
  const Solved s = bundled();
  const PhaseState base = phase_from_equilibrium(s.eq, s.prob);

  SUBCASE("zero perturbation is the identity") {
    const PhaseState p = perturb_state(base, 0.0, 42, 7);
    CHECK(p.x == base.x);
    CHECK(p.p == base.p);
    CHECK(p.mu == base.mu);
    CHECK(p.pi == base.pi);
  }
  SUBCASE("componentwise relative bound, vector scale for zero components") {
    for (int i = 0; i < 50; ++i) {
      const PhaseState p = perturb_state(base, 0.01, 42, i);
      // x = (r0, 0, 0): the zero slots move by at most 1% of r0
      CHECK(std::abs(p.x.x() - base.x.x()) <= 0.01 * s.eq.r0);
      CHECK(std::abs(p.x.y()) <= 0.01 * s.eq.r0);
      CHECK(std::abs(p.x.z()) <= 0.01 * s.eq.r0);
      CHECK(p.x.y() != 0.0);
      // nonzero slots move relative to their own magnitude
      CHECK(std::abs(p.mu.x() - base.mu.x()) <= 0.01 * std::abs(base.mu.x()));
      CHECK(std::abs(p.mu.z() - base.mu.z()) <= 0.01 * std::abs(base.mu.z()));
    }
  }
  SUBCASE("substreams depend only on (seed, index)") {
    const PhaseState a = perturb_state(base, 0.01, 42, 5);
    const PhaseState b = perturb_state(base, 0.01, 42, 5);
    const PhaseState c = perturb_state(base, 0.01, 43, 5);
    const PhaseState d = perturb_state(base, 0.01, 42, 6);
    CHECK(a.x == b.x);
    CHECK(a.pi == b.pi);
    CHECK(a.x != c.x);
    CHECK(a.x != d.x);
  }
}

TEST_CASE("zero perturbation: every sample stays on the orbit") {
  const Solved s = bundled();
  SheafConfig cfg = fast_config();
  cfg.n_samples = 4;
  cfg.rel_perturbation = 0.0;
  cfg.steps_per_turn = 2000;
  cfg.n_turns = 10.0;
  const SheafSummary sum = run_sheaf(s.eq, s.prob, cfg);
  CHECK(sum.n_bounded == cfg.n_samples);
  CHECK(sum.max_window_dev < 1e-6);
}

TEST_CASE("determinism and scheduling independence") {
  const Solved s = bundled();
  const SheafConfig cfg = fast_config();

  const SheafSummary a = run_sheaf(s.eq, s.prob, cfg);
  const SheafSummary b = run_sheaf(s.eq, s.prob, cfg);
  CHECK(outcomes_identical(a, b));

  SheafConfig serial = cfg;
  serial.parallel = false;
  const SheafSummary c = run_sheaf(s.eq, s.prob, serial);
  CHECK(outcomes_identical(a, c));
  CHECK(a.n_bounded == c.n_bounded);
  CHECK(a.n_escaped == c.n_escaped);
  CHECK(a.n_pole_collision == c.n_pole_collision);

  SheafConfig reseeded = cfg;
  reseeded.seed = 43;
  const SheafSummary d = run_sheaf(s.eq, s.prob, reseeded);
  CHECK_FALSE(outcomes_identical(a, d));
}

TEST_CASE("summary bookkeeping") {
  const Solved s = bundled();
  SheafConfig cfg = fast_config();
  cfg.n_samples = 16;
  const SheafSummary sum = run_sheaf(s.eq, s.prob, cfg);
  CHECK(sum.n_bounded + sum.n_escaped + sum.n_pole_collision == cfg.n_samples);
  CHECK(static_cast<int>(sum.outcomes.size()) == cfg.n_samples);
  for (int i = 0; i < cfg.n_samples; ++i) CHECK(sum.outcomes[i].index == i);
  for (const TrajectoryOutcome& o : sum.outcomes) {
    if (o.classification == Outcome::kBounded) {
      CHECK(o.turns_completed == doctest::Approx(cfg.n_turns).epsilon(1e-9));
      CHECK(o.max_radial_dev < cfg.max_radial_frac);
      CHECK(o.max_axial_dev < cfg.max_axial_frac);
    } else {
      CHECK(o.turns_completed < cfg.n_turns);
    }
  }
}

TEST_CASE("config validation") {
  const Solved s = bundled();
  SheafConfig cfg = fast_config();
  cfg.n_samples = 0;
  CHECK_THROWS_AS(run_sheaf(s.eq, s.prob, cfg), Error);
  cfg = fast_config();
  cfg.rel_perturbation = 1.0;
  CHECK_THROWS_AS(run_sheaf(s.eq, s.prob, cfg), Error);

  // static class is not a valid sheaf center
  EquilibriumProblem hover;
  hover.field.orbitron = {0.0, 0.05};
  hover.field.linear = {3.0, 9.81};
  hover.body = {1.0, 1.0, 0.01, 0.01};
  hover.r0 = 0.1;
  const RelativeEquilibrium heq = solve_equilibrium(hover);
  CHECK_THROWS_AS(run_sheaf(heq, hover, fast_config()), DegenerateAttitude);
}
