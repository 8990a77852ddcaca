#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "orbitron/report.hpp"
#include "support/oracles.hpp"

using namespace orbitron;

namespace {

const char* kMinimalConfig = R"(
# minimal explicit-body configuration
field.kappa = 1554.42
field.h = 0.0433
field.b0 = 0.1757
field.b_prime = 0.3346
body.mass = 0.00765
body.moment = 0.2034
body.i_perp = 1.206e-4
body.i_axial = 1.303e-4
orbit.r0 = 0.0586
sheaf.samples = 20   # trailing comment
sheaf.seed = 99
)";

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(kMinimalConfig, "mem");
  CHECK(cfg.field.orbitron.kappa == 1554.42);
  CHECK(cfg.field.linear.b_prime == 0.3346);
  REQUIRE(cfg.body_explicit.has_value());
  CHECK(cfg.body_explicit->moment == 0.2034);
  CHECK(cfg.r0 == 0.0586);
  CHECK(cfg.g == 9.81);  // default
  CHECK(cfg.sheaf.n_samples == 20);
  CHECK(cfg.sheaf.seed == 99);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors carry location and key diagnostics") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text, "t");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("field.kappa 12\n", "t:1");
  expect_error("unknown.key = 1\n", "unknown.key");
  expect_error("field.kappa = banana\n", "banana");
  expect_error("body.mass = 1\nbody.density = 2\n", "not both");
  expect_error("body.mass = 1\n", "body.moment");
  expect_error("integrator.method = euler\n", "euler");
}

TEST_CASE("exactly one body description") {
  RunConfig none;
  CHECK_THROWS_AS(none.validate(), ConfigError);
  CHECK_THROWS_AS(none.body(), ConfigError);
}

TEST_CASE("disk geometry derivation") {
  DiskGeometry d{7.4e3, 0.014, 0.006, 0.25};
  const BodyParams b = body_from_disk(d);
  // reproduces the reported mass to four significant digits
  CHECK(b.mass == doctest::Approx(0.00683484).epsilon(5e-4));
  // uniform magnetization moment
  CHECK(b.moment == doctest::Approx(0.18375).epsilon(5e-3));
  CHECK(b.i_perp == doctest::Approx(1.0423e-7).epsilon(1e-3));
  CHECK(b.i_axial == doctest::Approx(0.5 * b.mass * 0.007 * 0.007).epsilon(1e-12));
  // derived transverse inertia implies alpha ~ 1e7, famously incompatible
  // with a printed alpha of order one for the same disk
  CHECK(b.alpha() > 9e6);
  CHECK_THROWS_AS(body_from_disk(DiskGeometry{0, 0.014, 0.006, 0.25}), Error);
}

TEST_CASE("override precedence: flag beats file beats default") {
  RunConfig cfg = parse_config(kMinimalConfig, "mem");
  CHECK(cfg.sheaf.n_samples == 20);  // file beat the default (100)
  apply_override(&cfg, "sheaf.samples=7");
  CHECK(cfg.sheaf.n_samples == 7);  // override beat the file
  apply_override(&cfg, "body.mass=0.01");
  CHECK(cfg.body_explicit->mass == 0.01);
  CHECK(cfg.body_explicit->moment == 0.2034);  // untouched components survive
  CHECK_THROWS_AS(apply_override(&cfg, "nonsense"), ConfigError);
  CHECK_THROWS_AS(apply_override(&cfg, "body.density=1"), ConfigError);
}

TEST_CASE("equilibrium report round-trip") {
  const EquilibriumProblem prob = orbitron::testing::bundled_stable_problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);
  const Json j = equilibrium_to_json(eq);
  const RelativeEquilibrium back = equilibrium_from_json(j);
  CHECK(back.cls == eq.cls);
  CHECK(back.xi1 == eq.xi1);
  CHECK(back.xi2_tilde == eq.xi2_tilde);
  CHECK(back.nu1 == eq.nu1);
  CHECK(back.pi3 == eq.pi3);
  CHECK(back.residual_max == eq.residual_max);
  CHECK(back.zeta_sq_roots == eq.zeta_sq_roots);
  CHECK_NOTHROW(validate_equilibrium_report(back));

  Json broken = j;
  broken["nu1"] = 0.5;  // |nu| != 1
  CHECK_THROWS_AS(validate_equilibrium_report(equilibrium_from_json(broken)), Error);
}

TEST_CASE("stability report round-trip") {
  const EquilibriumProblem prob = orbitron::testing::bundled_stable_problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);
  const StabilityReport rep = stability_report(eq, prob);
  const Json j = stability_to_json(rep);
  const StabilityReport back = stability_from_json(j);
  CHECK(back.verdict == rep.verdict);
  CHECK(back.q1_minors == rep.q1_minors);
  CHECK(back.q2_minors == rep.q2_minors);
  CHECK(back.oracle_agreement == rep.oracle_agreement);
  CHECK(back.conditions.axial_curvature == rep.conditions.axial_curvature);
  CHECK(back.conditions.q1_analytic_verdict == rep.conditions.q1_analytic_verdict);
  CHECK_NOTHROW(validate_stability_report(back));

  Json broken = j;
  broken["q1_minors"][1] = -1.0;  // stable verdict with a negative minor
  CHECK_THROWS_AS(validate_stability_report(stability_from_json(broken)), Error);
}

TEST_CASE("sheaf report round-trip") {
  const EquilibriumProblem prob = orbitron::testing::bundled_stable_problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);
  SheafConfig cfg;
  cfg.n_samples = 6;
  cfg.n_turns = 2.0;
  cfg.steps_per_turn = 400;
  cfg.seed = 5;
  cfg.pole_guard_mult = 1.25;
  const SheafSummary sum = run_sheaf(eq, prob, cfg);
  const Json j = sheaf_to_json(sum);
  const SheafSummary back = sheaf_from_json(j);
  CHECK(back.n_bounded == sum.n_bounded);
  CHECK(back.outcomes.size() == sum.outcomes.size());
  for (size_t i = 0; i < sum.outcomes.size(); ++i) {
    CHECK(back.outcomes[i].classification == sum.outcomes[i].classification);
    CHECK(back.outcomes[i].max_radial_dev == sum.outcomes[i].max_radial_dev);
    CHECK(back.outcomes[i].final_state.pi == sum.outcomes[i].final_state.pi);
  }
  CHECK_NOTHROW(validate_sheaf_report(back));
}

TEST_CASE("trajectory emission schema") {
  const EquilibriumProblem prob = orbitron::testing::bundled_stable_problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);
  const PhaseState s0 = phase_from_equilibrium(eq, prob);
  IntegratorConfig icfg;
  const double period = 2.0 * M_PI / eq.xi1;
  icfg.dt = period / 400.0;
  icfg.record_stride = 40;
  const Trajectory traj = integrate(s0, prob, icfg, period);

  std::ostringstream out;
  write_trajectory(out, traj, prob);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "# t x1 x2 x3 p1 p2 p3 mu1 mu2 mu3 pi1 pi2 pi3 h J1 J2");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    double value;
    int cols = 0;
    while (row >> value) ++cols;
    CHECK(cols == 16);
    ++rows;
  }
  CHECK(rows == static_cast<int>(traj.samples.size()));
}

TEST_CASE("reference comparison report carries the solvability diagnostics") {
  RunConfig cfg;
  cfg.field.orbitron = {351.5625, 0.075};
  cfg.field.linear = {2.985, 0.35723477320570427127};
  cfg.body_disk = DiskGeometry{7.4e3, 0.014, 0.006, 0.25};
  cfg.r0 = 1.5;
  cfg.reference.alpha = 0.9594;
  cfg.reference.b1 = -0.17861738660285213564;
  cfg.reference.b3 = 2.9898002901596414059;

  const Json j = reference_comparison(cfg);
  CHECK(j.at("lambda").get<double>() == doctest::Approx(0.9790).epsilon(1e-3));
  CHECK(std::abs(j.at("sigma").get<double>()) < 1e-4);
  CHECK_FALSE(j.at("real_root_condition").at("satisfied").get<bool>());
  CHECK(j.at("alpha").at("rel_diff").get<double>() > 1e6);
  CHECK(j.at("b1").at("rel_diff").get<double>() ==
        doctest::Approx(0.5).epsilon(1e-6));
  CHECK(j.at("b3").at("abs_diff").get<double>() ==
        doctest::Approx(0.0048).epsilon(1e-2));
  CHECK(j.at("solve").get<std::string>().find("failed") == 0);
}
