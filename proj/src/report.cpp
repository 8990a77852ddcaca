#include "orbitron/report.hpp"

#include <cmath>
#include <ostream>

namespace orbitron {

namespace {

Json vec_to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json verdict_to_json(Verdict v) { return to_string(v); }

Verdict verdict_from_json(const Json& j) {
  const std::string s = j.get<std::string>();
  if (s == "stable") return Verdict::kStable;
  if (s == "unstable") return Verdict::kUnstable;
  if (s == "indeterminate") return Verdict::kIndeterminate;
  throw Error("unknown verdict '" + s + "'");
}

}  // namespace

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kBounded: return "bounded";
    case Outcome::kEscaped: return "escaped";
    default: return "pole_collision";
  }
}

Json equilibrium_to_json(const RelativeEquilibrium& eq) {
  Json j;
  j["class"] = eq.cls == EquilibriumClass::kOrbital ? "orbital" : "static";
  j["r0"] = eq.r0;
  j["lambda"] = eq.lambda;
  j["sigma"] = eq.sigma;
  j["zeta_sq"] = eq.zeta_sq;
  j["zeta_sq_roots"] = eq.zeta_sq_roots;
  j["xi1"] = eq.xi1;
  j["xi2_tilde"] = eq.xi2_tilde;
  j["xi2"] = eq.xi2;
  j["nu1"] = eq.nu1;
  j["nu3"] = eq.nu3;
  j["pi1"] = eq.pi1;
  j["pi3"] = eq.pi3;
  j["p0"] = eq.p0;
  Json res = Json::array();
  for (const Vec3& r : eq.residuals) res.push_back(vec_to_json(r));
  j["residuals"] = res;
  j["residual_max"] = eq.residual_max;
  return j;
}

RelativeEquilibrium equilibrium_from_json(const Json& j) {
  RelativeEquilibrium eq;
  eq.cls = j.at("class").get<std::string>() == "orbital" ? EquilibriumClass::kOrbital
                                                         : EquilibriumClass::kStatic;
  eq.r0 = j.at("r0").get<double>();
  eq.lambda = j.at("lambda").get<double>();
  eq.sigma = j.at("sigma").get<double>();
  eq.zeta_sq = j.at("zeta_sq").get<double>();
  eq.zeta_sq_roots = j.at("zeta_sq_roots").get<std::vector<double>>();
  eq.xi1 = j.at("xi1").get<double>();
  eq.xi2_tilde = j.at("xi2_tilde").get<double>();
  eq.xi2 = j.at("xi2").get<double>();
  eq.nu1 = j.at("nu1").get<double>();
  eq.nu3 = j.at("nu3").get<double>();
  eq.pi1 = j.at("pi1").get<double>();
  eq.pi3 = j.at("pi3").get<double>();
  eq.p0 = j.at("p0").get<double>();
  const Json& res = j.at("residuals");
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 3; ++k) eq.residuals[i](k) = res.at(i).at(k).get<double>();
  }
  eq.residual_max = j.at("residual_max").get<double>();
  return eq;
}

void validate_equilibrium_report(const RelativeEquilibrium& eq) {
  if (eq.r0 <= 0.0) throw Error("report: r0 must be positive");
  const double norm = eq.nu1 * eq.nu1 + eq.nu3 * eq.nu3;
  if (std::abs(norm - 1.0) > 1e-12) throw Error("report: |nu| != 1");
  if (eq.cls == EquilibriumClass::kOrbital) {
    if (eq.xi1 < 0.0) throw Error("report: xi1 sign convention violated");
    if (eq.nu3 == 0.0) throw Error("report: nu3 = 0 is inadmissible");
  }
  for (double u : eq.zeta_sq_roots) {
    if (u < 0.0) throw Error("report: negative zeta_sq root");
  }
}

Json stability_to_json(const StabilityReport& rep) {
  Json j;
  j["q1_minors"] = rep.q1_minors;
  j["q2_minors"] = rep.q2_minors;
  j["diagonal_positive"] = rep.diagonal_positive;
  j["q1_verdict"] = verdict_to_json(rep.q1_verdict);
  j["q2_verdict"] = verdict_to_json(rep.q2_verdict);
  j["verdict"] = verdict_to_json(rep.verdict);
  j["eigen_verdict"] = verdict_to_json(rep.eigen_verdict);
  j["oracle_agreement"] = rep.oracle_agreement;
  j["q1_min_eigenvalue"] = rep.q1_min_eigenvalue;
  j["q2_min_eigenvalue"] = rep.q2_min_eigenvalue;
  j["block_residual"] = rep.block_residual;
  j["route_mismatch"] = rep.route_mismatch;
  j["analytic_matches_minors"] = rep.analytic_matches_minors;

  Json c;
  const AnalyticConditions& ac = rep.conditions;
  c["orbital_stiffness"] = {{"value", ac.orbital_stiffness},
                            {"state", verdict_to_json(ac.orbital_stiffness_state)}};
  c["q1_det_condition"] = {{"value", ac.q1_det_condition},
                           {"state", verdict_to_json(ac.q1_det_state)}};
  c["moment_alignment"] = {{"value", ac.moment_alignment},
                           {"state", verdict_to_json(ac.moment_alignment_state)}};
  c["axial_curvature"] = {{"value", ac.axial_curvature},
                          {"state", verdict_to_json(ac.axial_curvature_state)}};
  c["radial_coupling"] = {{"value", ac.radial_coupling},
                          {"state", verdict_to_json(ac.radial_coupling_state)},
                          {"defined", ac.radial_coupling_defined}};
  c["alignment_identity"] = {{"lhs_effective", ac.alignment_identity_lhs_effective},
                             {"lhs_bare", ac.alignment_identity_lhs_bare},
                             {"rhs", ac.alignment_identity_rhs}};
  c["q1_analytic_verdict"] = verdict_to_json(ac.q1_analytic_verdict);
  j["conditions"] = c;
  return j;
}

StabilityReport stability_from_json(const Json& j) {
  StabilityReport rep;
  for (int i = 0; i < 3; ++i) rep.q1_minors[i] = j.at("q1_minors").at(i).get<double>();
  for (int i = 0; i < 4; ++i) rep.q2_minors[i] = j.at("q2_minors").at(i).get<double>();
  for (int i = 0; i < 7; ++i)
    rep.diagonal_positive[i] = j.at("diagonal_positive").at(i).get<bool>();
  rep.q1_verdict = verdict_from_json(j.at("q1_verdict"));
  rep.q2_verdict = verdict_from_json(j.at("q2_verdict"));
  rep.verdict = verdict_from_json(j.at("verdict"));
  rep.eigen_verdict = verdict_from_json(j.at("eigen_verdict"));
  rep.oracle_agreement = j.at("oracle_agreement").get<bool>();
  rep.q1_min_eigenvalue = j.at("q1_min_eigenvalue").get<double>();
  rep.q2_min_eigenvalue = j.at("q2_min_eigenvalue").get<double>();
  rep.block_residual = j.at("block_residual").get<double>();
  rep.route_mismatch = j.at("route_mismatch").get<double>();
  rep.analytic_matches_minors = j.at("analytic_matches_minors").get<bool>();
  const Json& c = j.at("conditions");
  AnalyticConditions& ac = rep.conditions;
  ac.orbital_stiffness = c.at("orbital_stiffness").at("value").get<double>();
  ac.orbital_stiffness_state = verdict_from_json(c.at("orbital_stiffness").at("state"));
  ac.q1_det_condition = c.at("q1_det_condition").at("value").get<double>();
  ac.q1_det_state = verdict_from_json(c.at("q1_det_condition").at("state"));
  ac.moment_alignment = c.at("moment_alignment").at("value").get<double>();
  ac.moment_alignment_state = verdict_from_json(c.at("moment_alignment").at("state"));
  ac.axial_curvature = c.at("axial_curvature").at("value").get<double>();
  ac.axial_curvature_state = verdict_from_json(c.at("axial_curvature").at("state"));
  ac.radial_coupling = c.at("radial_coupling").at("value").get<double>();
  ac.radial_coupling_state = verdict_from_json(c.at("radial_coupling").at("state"));
  ac.radial_coupling_defined = c.at("radial_coupling").at("defined").get<bool>();
  ac.alignment_identity_lhs_effective =
      c.at("alignment_identity").at("lhs_effective").get<double>();
  ac.alignment_identity_lhs_bare = c.at("alignment_identity").at("lhs_bare").get<double>();
  ac.alignment_identity_rhs = c.at("alignment_identity").at("rhs").get<double>();
  ac.q1_analytic_verdict = verdict_from_json(c.at("q1_analytic_verdict"));
  return rep;
}

void validate_stability_report(const StabilityReport& rep) {
  const bool all_pos =
      rep.q1_minors[0] > 0 && rep.q1_minors[1] > 0 && rep.q1_minors[2] > 0 &&
      rep.q2_minors[0] > 0 && rep.q2_minors[1] > 0 && rep.q2_minors[2] > 0 &&
      rep.q2_minors[3] > 0;
  if (rep.verdict == Verdict::kStable && !all_pos) {
    throw Error("report: stable verdict with a non-positive leading minor");
  }
  if (all_pos && rep.verdict == Verdict::kUnstable) {
    throw Error("report: unstable verdict with all leading minors positive");
  }
}

Json sheaf_to_json(const SheafSummary& s) {
  Json j;
  j["n_bounded"] = s.n_bounded;
  j["n_escaped"] = s.n_escaped;
  j["n_pole_collision"] = s.n_pole_collision;
  j["min_turns_to_escape"] = s.min_turns_to_escape;
  j["max_window_dev"] = s.max_window_dev;
  Json outs = Json::array();
  for (const TrajectoryOutcome& o : s.outcomes) {
    Json jo;
    jo["index"] = o.index;
    jo["classification"] = outcome_name(o.classification);
    jo["turns_completed"] = o.turns_completed;
    jo["max_radial_dev"] = o.max_radial_dev;
    jo["max_axial_dev"] = o.max_axial_dev;
    jo["max_dev_x"] = o.max_dev_x;
    jo["max_dev_p"] = o.max_dev_p;
    jo["max_dev_mu"] = o.max_dev_mu;
    jo["max_dev_pi"] = o.max_dev_pi;
    jo["max_rel_drift_h"] = o.max_rel_drift_h;
    jo["final_state"] = {{"t", o.final_state.t},
                         {"x", vec_to_json(o.final_state.x)},
                         {"p", vec_to_json(o.final_state.p)},
                         {"mu", vec_to_json(o.final_state.mu)},
                         {"pi", vec_to_json(o.final_state.pi)}};
    outs.push_back(jo);
  }
  j["outcomes"] = outs;
  return j;
}

SheafSummary sheaf_from_json(const Json& j) {
  SheafSummary s;
  s.n_bounded = j.at("n_bounded").get<int>();
  s.n_escaped = j.at("n_escaped").get<int>();
  s.n_pole_collision = j.at("n_pole_collision").get<int>();
  s.min_turns_to_escape = j.at("min_turns_to_escape").get<double>();
  s.max_window_dev = j.at("max_window_dev").get<double>();
  for (const Json& jo : j.at("outcomes")) {
    TrajectoryOutcome o;
    o.index = jo.at("index").get<int>();
    const std::string c = jo.at("classification").get<std::string>();
    o.classification = c == "bounded"   ? Outcome::kBounded
                       : c == "escaped" ? Outcome::kEscaped
                                        : Outcome::kPoleCollision;
    o.turns_completed = jo.at("turns_completed").get<double>();
    o.max_radial_dev = jo.at("max_radial_dev").get<double>();
    o.max_axial_dev = jo.at("max_axial_dev").get<double>();
    o.max_dev_x = jo.at("max_dev_x").get<double>();
    o.max_dev_p = jo.at("max_dev_p").get<double>();
    o.max_dev_mu = jo.at("max_dev_mu").get<double>();
    o.max_dev_pi = jo.at("max_dev_pi").get<double>();
    o.max_rel_drift_h = jo.at("max_rel_drift_h").get<double>();
    const Json& fs = jo.at("final_state");
    o.final_state.t = fs.at("t").get<double>();
    for (int k = 0; k < 3; ++k) {
      o.final_state.x(k) = fs.at("x").at(k).get<double>();
      o.final_state.p(k) = fs.at("p").at(k).get<double>();
      o.final_state.mu(k) = fs.at("mu").at(k).get<double>();
      o.final_state.pi(k) = fs.at("pi").at(k).get<double>();
    }
    s.outcomes.push_back(o);
  }
  return s;
}

void validate_sheaf_report(const SheafSummary& s) {
  if (s.n_bounded + s.n_escaped + s.n_pole_collision !=
      static_cast<int>(s.outcomes.size())) {
    throw Error("report: sheaf counts do not add up");
  }
  for (const TrajectoryOutcome& o : s.outcomes) {
    if (o.turns_completed < 0.0) throw Error("report: negative turn count");
  }
}

Json field_sample_to_json(const FieldSample& s, const Vec3& x,
                          const MaxwellResidual& maxwell) {
  Json j;
  j["x"] = vec_to_json(x);
  j["b"] = vec_to_json(s.b);
  Json jac = Json::array();
  for (int i = 0; i < 3; ++i)
    jac.push_back(Json::array({s.jac(i, 0), s.jac(i, 1), s.jac(i, 2)}));
  j["jac"] = jac;
  Json hess = Json::array();
  for (int i = 0; i < 3; ++i) {
    Json hi = Json::array();
    for (int k = 0; k < 3; ++k)
      hi.push_back(Json::array({s.hess[i](k, 0), s.hess[i](k, 1), s.hess[i](k, 2)}));
    hess.push_back(hi);
  }
  j["hess"] = hess;
  j["maxwell"] = {{"div_rel", maxwell.divergence}, {"curl_rel", maxwell.curl_norm}};
  return j;
}

Json reference_comparison(const RunConfig& cfg) {
  Json j;
  const EquilibriumProblem prob = cfg.problem();
  const MidplaneDerivs d = midplane_derivs(prob.field, prob.r0);

  DimensionlessParams dp;
  try {
    dp = dimensionless_params(prob);
    j["lambda"] = dp.lambda;
    j["sigma"] = dp.sigma;
    const double core = dp.lambda * dp.lambda * (1.0 + dp.sigma * dp.sigma) - 1.0;
    j["real_root_condition"] = {{"value", core}, {"satisfied", core >= 0.0}};
  } catch (const DegenerateField&) {
    j["lambda"] = nullptr;
  }

  auto mismatch = [](double computed, double reference) {
    Json m;
    m["computed"] = computed;
    m["reference"] = reference;
    m["abs_diff"] = std::abs(computed - reference);
    const double den = std::max(std::abs(reference), 1e-300);
    m["rel_diff"] = std::abs(computed - reference) / den;
    return m;
  };

  const ReferenceValues& ref = cfg.reference;
  if (ref.alpha) j["alpha"] = mismatch(prob.body.alpha(), *ref.alpha);
  if (ref.b1) j["b1"] = mismatch(d.b1, *ref.b1);
  if (ref.b3) j["b3"] = mismatch(d.b3, *ref.b3);

  try {
    const RelativeEquilibrium eq = solve_equilibrium(prob);
    j["solve"] = "ok";
    if (ref.xi1) j["xi1"] = mismatch(eq.xi1, *ref.xi1);
    if (ref.xi2_tilde) j["xi2_tilde"] = mismatch(eq.xi2_tilde, *ref.xi2_tilde);
    if (ref.nu1) j["nu1"] = mismatch(eq.nu1, *ref.nu1);
    if (ref.nu3) j["nu3"] = mismatch(eq.nu3, *ref.nu3);
    if (ref.pi1) j["pi1"] = mismatch(eq.pi1, *ref.pi1);
    if (ref.pi3) j["pi3"] = mismatch(eq.pi3, *ref.pi3);
  } catch (const Error& e) {
    j["solve"] = std::string("failed: ") + e.what();
  }
  return j;
}

void write_trajectory(std::ostream& out, const Trajectory& traj,
                      const EquilibriumProblem& prob) {
  (void)prob;
  out << "# t x1 x2 x3 p1 p2 p3 mu1 mu2 mu3 pi1 pi2 pi3 h J1 J2\n";
  out.precision(17);
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const PhaseState& s = traj.samples[i];
    out << s.t;
    for (int k = 0; k < 3; ++k) out << ' ' << s.x(k);
    for (int k = 0; k < 3; ++k) out << ' ' << s.p(k);
    for (int k = 0; k < 3; ++k) out << ' ' << s.mu(k);
    for (int k = 0; k < 3; ++k) out << ' ' << s.pi(k);
    out << ' ' << traj.trace.h[i] << ' ' << traj.trace.j1[i] << ' '
        << traj.trace.j2[i] << '\n';
  }
  out.flush();
}

}  // namespace orbitron
