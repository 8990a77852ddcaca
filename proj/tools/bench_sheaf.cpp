// Benchmark: serial reference vs OpenMP-parallel sheaf, plus batched field
// evaluation throughput, on the bundled stable configuration.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "orbitron/config.hpp"
#include "orbitron/sheaf.hpp"

using namespace orbitron;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sheaf benchmark: serial reference vs parallel"};
  std::string config_path = "configs/stable.conf";
  int samples = 100;
  double turns = 10.0;
  int field_points = 2000000;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--samples", samples, "sheaf sample count");
  app.add_option("--turns", turns, "turns per trajectory");
  app.add_option("--field-points", field_points, "batched field evaluations");
  CLI11_PARSE(app, argc, argv);

  RunConfig cfg = load_config(config_path);
  cfg.validate();
  const EquilibriumProblem prob = cfg.problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);

  SheafConfig scfg = cfg.sheaf;
  scfg.n_samples = samples;
  scfg.n_turns = turns;

  scfg.parallel = false;
  auto t0 = Clock::now();
  const SheafSummary serial = run_sheaf(eq, prob, scfg);
  const double t_serial = seconds_since(t0);

  scfg.parallel = true;
  t0 = Clock::now();
  const SheafSummary parallel = run_sheaf(eq, prob, scfg);
  const double t_parallel = seconds_since(t0);

  std::cout << "sheaf (" << samples << " samples x " << turns << " turns)\n"
            << "  serial:   " << t_serial << " s (" << serial.n_bounded
            << " bounded)\n"
            << "  parallel: " << t_parallel << " s (" << parallel.n_bounded
            << " bounded)\n"
            << "  speedup:  " << t_serial / t_parallel << "x\n";

  bool identical = serial.n_bounded == parallel.n_bounded &&
                   serial.n_escaped == parallel.n_escaped;
  for (size_t i = 0; identical && i < serial.outcomes.size(); ++i) {
    identical = serial.outcomes[i].max_dev_x == parallel.outcomes[i].max_dev_x &&
                serial.outcomes[i].final_state.x == parallel.outcomes[i].final_state.x;
  }
  std::cout << "  results " << (identical ? "bitwise identical" : "DIFFER") << "\n";

  // batched field evaluation: serial vs parallel sum of Jacobian traces
  std::vector<Vec3> pts(field_points);
  for (int i = 0; i < field_points; ++i) {
    const double a = 1e-4 * i;
    pts[i] = Vec3(prob.r0 * (1.0 + 0.3 * std::sin(a)), 0.2 * prob.r0 * std::cos(a),
                  0.1 * prob.r0 * std::sin(3.0 * a));
  }
  double acc = 0.0;
  t0 = Clock::now();
  for (const Vec3& x : pts) acc += eval_total(prob.field, x).jac(2, 0);
  const double t_field_serial = seconds_since(t0);

  double acc_par = 0.0;
  t0 = Clock::now();
#ifdef ORBITRON_HAVE_OPENMP
#pragma omp parallel for reduction(+ : acc_par)
#endif
  for (int i = 0; i < field_points; ++i) {
    acc_par += eval_total(prob.field, pts[i]).jac(2, 0);
  }
  const double t_field_parallel = seconds_since(t0);

  std::cout << "field eval (" << field_points << " points)\n"
            << "  serial:   " << t_field_serial << " s\n"
            << "  parallel: " << t_field_parallel << " s\n"
            << "  speedup:  " << t_field_serial / t_field_parallel << "x\n"
            << "  (checksums " << acc << " / " << acc_par << ")\n";
  return identical ? 0 : 1;
}
