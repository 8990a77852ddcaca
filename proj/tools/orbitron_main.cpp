// Command-line driver: solve, analyze, simulate and report on spinning-dipole
// levitation in the combined pole-pair + linear compensation field.
//
// Exit codes: 0 success, 1 error, 2 no equilibrium exists,
//             3 equilibrium found but not stable.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "orbitron/report.hpp"
#include "orbitron/search.hpp"

namespace {

using namespace orbitron;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoEquilibrium = 2;
constexpr int kExitUnstable = 3;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> turns;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", args->config_path, "configuration file");
  if (needs_config) opt->required();
  cmd->add_option("--set", args->overrides, "override, key=value (repeatable)");
  cmd->add_option("--out", args->out_path, "output file path");
  cmd->add_option("--seed", args->seed, "random seed (overrides sheaf.seed)");
  cmd->add_option("--samples", args->samples, "sheaf sample count");
  cmd->add_option("--turns", args->turns, "number of orbital turns");
}

// flag > config file > default
RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  for (const std::string& ov : args.overrides) apply_override(&cfg, ov);
  if (args.seed) cfg.sheaf.seed = *args.seed;
  if (args.samples) cfg.sheaf.n_samples = *args.samples;
  if (args.turns) cfg.sheaf.n_turns = *args.turns;
  cfg.validate();
  return cfg;
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file '" + path + "'");
  out << j.dump(2) << '\n';
}

void print_equilibrium(const RelativeEquilibrium& eq) {
  std::cout << "class: " << (eq.cls == EquilibriumClass::kOrbital ? "orbital" : "static")
            << "\n  lambda = " << eq.lambda << ", sigma = " << eq.sigma
            << "\n  zeta_sq = " << eq.zeta_sq << " (roots:";
  for (double u : eq.zeta_sq_roots) std::cout << ' ' << u;
  std::cout << ")\n  xi1 = " << eq.xi1 << " rad/s, xi2_tilde = " << eq.xi2_tilde
            << " rad/s\n  nu = (" << eq.nu1 << ", 0, " << eq.nu3 << ")"
            << "\n  pi = (" << eq.pi1 << ", 0, " << eq.pi3 << ") kg m^2/s"
            << "\n  p0 = " << eq.p0 << " kg m/s"
            << "\n  residual_max = " << eq.residual_max << "\n";
}

void print_stability(const StabilityReport& rep) {
  std::cout << "verdict: " << to_string(rep.verdict)
            << " (eigen oracle: " << to_string(rep.eigen_verdict)
            << (rep.oracle_agreement ? ", agree" : ", DISAGREE") << ")\n  q1 minors:";
  for (double m : rep.q1_minors) std::cout << ' ' << m;
  std::cout << "\n  q2 minors:";
  for (double m : rep.q2_minors) std::cout << ' ' << m;
  std::cout << "\n  closed-form vs projection mismatch: " << rep.route_mismatch
            << "\n  cross-block residual: " << rep.block_residual << "\n  conditions:"
            << "\n    orbital_stiffness = " << rep.conditions.orbital_stiffness << " ["
            << to_string(rep.conditions.orbital_stiffness_state) << "]"
            << "\n    q1_det_condition  = " << rep.conditions.q1_det_condition << " ["
            << to_string(rep.conditions.q1_det_state) << "]"
            << "\n    moment_alignment  = " << rep.conditions.moment_alignment << " ["
            << to_string(rep.conditions.moment_alignment_state) << "]"
            << "\n    axial_curvature   = " << rep.conditions.axial_curvature << " ["
            << to_string(rep.conditions.axial_curvature_state) << "]"
            << "\n    radial_coupling   = " << rep.conditions.radial_coupling << " ["
            << to_string(rep.conditions.radial_coupling_state) << "]\n";
}

int exit_code_for_verdict(Verdict v) {
  return v == Verdict::kStable ? kExitOk : kExitUnstable;
}

int cmd_field_probe(const CommonArgs& args, const std::vector<std::string>& points) {
  const RunConfig cfg = resolve_config(args);
  Json out = Json::array();
  for (const std::string& spec : points) {
    Vec3 x;
    if (std::sscanf(spec.c_str(), "%lf,%lf,%lf", &x.x(), &x.y(), &x.z()) != 3) {
      throw ConfigError("point '" + spec + "': expected x,y,z");
    }
    const FieldSample s = eval_total(cfg.field, x);
    const MaxwellResidual mr = maxwell_residual(cfg.field, x);
    out.push_back(field_sample_to_json(s, x, mr));
    std::cout << "B(" << x.transpose() << ") = " << s.b.transpose()
              << "  [div_rel " << mr.divergence << ", curl_rel " << mr.curl_norm
              << "]\n";
  }
  if (!args.out_path.empty()) write_json(args.out_path, out);
  return kExitOk;
}

int cmd_equilibrium(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const RelativeEquilibrium eq = solve_equilibrium(cfg.problem());
  print_equilibrium(eq);
  if (!args.out_path.empty()) write_json(args.out_path, equilibrium_to_json(eq));
  return kExitOk;
}

int cmd_stability(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const EquilibriumProblem prob = cfg.problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);
  print_equilibrium(eq);
  const StabilityReport rep = stability_report(eq, prob);
  print_stability(rep);
  if (!args.out_path.empty()) {
    Json j;
    j["equilibrium"] = equilibrium_to_json(eq);
    j["stability"] = stability_to_json(rep);
    write_json(args.out_path, j);
  }
  return exit_code_for_verdict(rep.verdict);
}

int cmd_simulate(const CommonArgs& args, double perturbation) {
  const RunConfig cfg = resolve_config(args);
  const EquilibriumProblem prob = cfg.problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);
  if (eq.cls != EquilibriumClass::kOrbital) {
    std::cerr << "static class: nothing to integrate\n";
    return kExitNoEquilibrium;
  }
  const double period = 2.0 * 3.14159265358979323846 / eq.xi1;
  PhaseState s0 = phase_from_equilibrium(eq, prob);
  if (perturbation > 0.0) s0 = perturb_state(s0, perturbation, cfg.sheaf.seed, 0);

  IntegratorConfig icfg;
  icfg.method = cfg.integrator_method;
  icfg.dt = period / cfg.steps_per_turn;
  icfg.rtol = cfg.rtol;
  icfg.atol = cfg.atol;
  icfg.renormalize_mu = cfg.renormalize_mu;
  icfg.record_stride = cfg.record_stride;

  const Trajectory traj = integrate(s0, prob, icfg, cfg.sheaf.n_turns * period);
  std::cout << "integrated " << traj.t_end << " s (" << traj.t_end / period
            << " turns), outcome " << outcome_name(traj.outcome)
            << "\n  rel drift: h " << traj.trace.max_rel_drift_h << ", J1 "
            << traj.trace.max_rel_drift_j1 << ", J2 " << traj.trace.max_rel_drift_j2
            << ", |mu| " << traj.trace.max_rel_drift_mu << "\n";
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) throw Error("cannot open output file '" + args.out_path + "'");
    write_trajectory(out, traj, prob);
  }
  return kExitOk;
}

int cmd_sheaf(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const EquilibriumProblem prob = cfg.problem();
  const RelativeEquilibrium eq = solve_equilibrium(prob);
  const SheafSummary summary = run_sheaf(eq, prob, cfg.sheaf);
  std::cout << "sheaf: " << summary.n_bounded << " bounded, " << summary.n_escaped
            << " escaped, " << summary.n_pole_collision << " pole collisions";
  if (summary.n_escaped + summary.n_pole_collision > 0) {
    std::cout << " (first loss at " << summary.min_turns_to_escape << " turns)";
  }
  std::cout << "\n";
  if (!args.out_path.empty()) write_json(args.out_path, sheaf_to_json(summary));
  return kExitOk;
}

int cmd_full_report(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const EquilibriumProblem prob = cfg.problem();

  Json report;
  report["config"] = config_keys(cfg);
  if (cfg.body_disk) {
    const BodyParams derived = cfg.body();
    report["derived_body"] = {{"mass", derived.mass},
                              {"moment", derived.moment},
                              {"i_perp", derived.i_perp},
                              {"i_axial", derived.i_axial},
                              {"alpha", derived.alpha()}};
    if (cfg.reference.alpha &&
        std::abs(derived.alpha() - *cfg.reference.alpha) >
            1e-3 * std::abs(*cfg.reference.alpha)) {
      std::cerr << "warning: derived alpha " << derived.alpha()
                << " differs from reference.alpha " << *cfg.reference.alpha << "\n";
    }
  }
  report["reference_comparison"] = reference_comparison(cfg);

  int code = kExitOk;
  try {
    const RelativeEquilibrium eq = solve_equilibrium(prob);
    report["equilibrium"] = equilibrium_to_json(eq);
    print_equilibrium(eq);
    if (eq.cls == EquilibriumClass::kOrbital) {
      const StabilityReport rep = stability_report(eq, prob);
      report["stability"] = stability_to_json(rep);
      print_stability(rep);
      if (rep.verdict == Verdict::kStable) {
        const SheafSummary summary = run_sheaf(eq, prob, cfg.sheaf);
        report["sheaf"] = sheaf_to_json(summary);
        std::cout << "sheaf: " << summary.n_bounded << "/" << cfg.sheaf.n_samples
                  << " bounded\n";
        if (summary.n_bounded != cfg.sheaf.n_samples) code = kExitUnstable;
      } else {
        code = kExitUnstable;
      }
    } else {
      report["stability"] = nullptr;
    }
  } catch (const NoRealEquilibrium& e) {
    report["equilibrium"] = {{"error", e.what()}};
    code = kExitNoEquilibrium;
  } catch (const NoAdmissibleRoot& e) {
    report["equilibrium"] = {{"error", e.what()}};
    code = kExitNoEquilibrium;
  } catch (const DegenerateAttitude& e) {
    report["equilibrium"] = {{"error", e.what()}};
    code = kExitNoEquilibrium;
  }
  report["exit_code"] = code;

  if (!args.out_path.empty()) write_json(args.out_path, report);
  std::cout << "exit code " << code << "\n";
  return code;
}

int cmd_search(const std::string& kind, std::uint64_t seed, const std::string& out) {
  SearchOptions opts;
  const auto result = kind == "stable" ? find_stable_configuration(seed, opts)
                                       : find_unstable_configuration(seed, opts);
  if (!result) {
    std::cerr << "search exhausted " << opts.max_trials << " trials\n";
    return kExitNoEquilibrium;
  }
  const EquilibriumProblem& p = result->problem;
  const SearchOptions opts_used;
  std::cout << "found after " << result->trials_used << " trials:\n";
  std::ostringstream cfg;
  cfg.precision(17);
  cfg << "field.kappa = " << p.field.orbitron.kappa << "\n"
      << "field.h = " << p.field.orbitron.h << "\n"
      << "field.b0 = " << p.field.linear.b0 << "\n"
      << "field.b_prime = " << p.field.linear.b_prime << "\n"
      << "body.mass = " << p.body.mass << "\n"
      << "body.moment = " << p.body.moment << "\n"
      << "body.i_perp = " << p.body.i_perp << "\n"
      << "body.i_axial = " << p.body.i_axial << "\n"
      << "orbit.r0 = " << p.r0 << "\n"
      << "orbit.g = " << p.g << "\n"
      << "sheaf.samples = 100\n"
      << "sheaf.rel_perturbation = 0.01\n"
      << "sheaf.turns = " << (kind == "stable" ? 10 : 3) << "\n"
      << "sheaf.seed = " << opts_used.protocol_seed << "\n";
  if (kind == "stable") {
    // stable orbits of this trap sit closer to the poles than the default
    // 2h clearance guard; the protocol guard rides below the orbit radius
    cfg << "sheaf.pole_guard_mult = " << opts_used.protocol_pole_guard_mult << "\n";
  }
  std::cout << cfg.str();
  print_equilibrium(result->eq);
  print_stability(result->report);
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw Error("cannot open output file '" + out + "'");
    f << "# generated by 'orbitron search --kind " << kind << " --seed " << seed
      << "'\n"
      << cfg.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinning magnetic dipole levitation: equilibria, stability, simulation"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<std::string> probe_points;
  double sim_perturbation = 0.0;
  std::string search_kind = "stable";
  std::uint64_t search_seed = 20250811;
  std::string search_out;

  auto* probe = app.add_subcommand("field-probe", "evaluate the field at points");
  add_common(probe, &args);
  probe->add_option("--at", probe_points, "evaluation point x,y,z (repeatable)")
      ->required();

  auto* equil = app.add_subcommand("equilibrium", "solve the relative equilibrium");
  add_common(equil, &args);

  auto* stab = app.add_subcommand("stability", "equilibrium + reduced-form stability");
  add_common(stab, &args);

  auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
  add_common(sim, &args);
  sim->add_option("--perturb", sim_perturbation, "relative initial perturbation");

  auto* sheaf = app.add_subcommand("sheaf", "Monte Carlo perturbation sheaf");
  add_common(sheaf, &args);

  auto* full = app.add_subcommand("full-report", "chain all stages into one report");
  add_common(full, &args);

  auto* search = app.add_subcommand("search", "seeded deterministic parameter search");
  search->add_option("--kind", search_kind, "stable | unstable")
      ->check(CLI::IsMember({"stable", "unstable"}));
  search->add_option("--seed", search_seed, "search seed");
  search->add_option("--out", search_out, "write found configuration here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (probe->parsed()) return cmd_field_probe(args, probe_points);
    if (equil->parsed()) return cmd_equilibrium(args);
    if (stab->parsed()) return cmd_stability(args);
    if (sim->parsed()) return cmd_simulate(args, sim_perturbation);
    if (sheaf->parsed()) return cmd_sheaf(args);
    if (full->parsed()) return cmd_full_report(args);
    if (search->parsed()) return cmd_search(search_kind, search_seed, search_out);
  } catch (const NoRealEquilibrium& e) {
    std::cerr << "no equilibrium: " << e.what() << "\n";
    return kExitNoEquilibrium;
  } catch (const NoAdmissibleRoot& e) {
    std::cerr << "no equilibrium: " << e.what() << "\n";
    return kExitNoEquilibrium;
  } catch (const DegenerateAttitude& e) {
    std::cerr << "degenerate equilibrium: " << e.what() << "\n";
    return kExitNoEquilibrium;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
