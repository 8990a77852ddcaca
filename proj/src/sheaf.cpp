#include "orbitron/sheaf.hpp"

#include <algorithm>
#include <cmath>

namespace orbitron {

namespace {

// splitmix64: tiny, portable, reproducible across platforms and thread
// schedules. One independent stream per (seed, sample) pair.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in [-1, 1)
  double uniform_pm1() {
    return static_cast<double>(next() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
  }
};

SplitMix64 substream(std::uint64_t seed, int index) {
  SplitMix64 mix{seed ^ (0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(index) + 1))};
  mix.next();
  mix.next();
  return mix;
}

void perturb_vec(Vec3* v, double rel, SplitMix64* rng) {
  const double scale = v->cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (int i = 0; i < 3; ++i) {
    const double base = std::abs((*v)(i)) > 1e-12 * scale ? std::abs((*v)(i)) : scale;
    (*v)(i) += rel * base * rng->uniform_pm1();
  }
}

TrajectoryOutcome run_sample(int index, const PhaseState& base,
                             const RelativeEquilibrium& eq,
                             const EquilibriumProblem& prob,
                             const SheafConfig& cfg, double period) {
  TrajectoryOutcome out;
  out.index = index;

  const PhaseState s0 = perturb_state(base, cfg.rel_perturbation, cfg.seed, index);

  IntegratorConfig icfg;
  icfg.method = IntegratorMethod::kRk4Fixed;
  icfg.dt = period / cfg.steps_per_turn;
  icfg.record_stride = cfg.record_stride;
  icfg.renormalize_mu = cfg.renormalize_mu;

  BoundsSpec bounds;
  bounds.r0 = eq.r0;
  bounds.max_radial_frac = cfg.max_radial_frac;
  bounds.max_axial_frac = cfg.max_axial_frac;
  bounds.pole_guard_mult = cfg.pole_guard_mult;
  bounds.escape_radius_frac = cfg.escape_radius_frac;

  Trajectory traj;
  try {
    traj = integrate(s0, prob, icfg, cfg.n_turns * period, bounds);
    out.classification = traj.outcome;
  } catch (const PoleSingularity&) {
    out.classification = Outcome::kPoleCollision;
  }

  if (!traj.samples.empty()) {
    out.final_state = traj.samples.back();
    out.turns_completed = traj.t_end / period;
    out.max_rel_drift_h = traj.trace.max_rel_drift_h;

    const Vec3 x_ref = base.x, p_ref = base.p, mu_ref = base.mu, pi_ref = base.pi;
    const double sx = x_ref.norm(), sp = p_ref.norm(), smu = mu_ref.norm(),
                 spi = std::max(pi_ref.norm(), 1e-300);
    for (const PhaseState& s : traj.samples) {
      out.max_radial_dev = std::max(
          out.max_radial_dev, std::abs(std::hypot(s.x.x(), s.x.y()) - eq.r0) / eq.r0);
      out.max_axial_dev = std::max(out.max_axial_dev, std::abs(s.x.z()) / eq.r0);
      const Mat3 back = rotation_about_e3(-eq.xi1 * s.t);
      out.max_dev_x = std::max(out.max_dev_x, (back * s.x - x_ref).norm() / sx);
      out.max_dev_p = std::max(out.max_dev_p, (back * s.p - p_ref).norm() / sp);
      out.max_dev_mu = std::max(out.max_dev_mu, (back * s.mu - mu_ref).norm() / smu);
      out.max_dev_pi = std::max(out.max_dev_pi, (back * s.pi - pi_ref).norm() / spi);
    }
  }
  return out;
}

}  // namespace

PhaseState perturb_state(const PhaseState& base, double rel_perturbation,
                         std::uint64_t seed, int sample_index) {
  SplitMix64 rng = substream(seed, sample_index);
  PhaseState s = base;
  perturb_vec(&s.x, rel_perturbation, &rng);
  perturb_vec(&s.p, rel_perturbation, &rng);
  perturb_vec(&s.mu, rel_perturbation, &rng);
  perturb_vec(&s.pi, rel_perturbation, &rng);
  return s;
}

SheafSummary run_sheaf(const RelativeEquilibrium& eq,
                       const EquilibriumProblem& prob, const SheafConfig& cfg) {
  if (cfg.n_samples < 1) throw Error("sheaf requires n_samples >= 1");
  if (cfg.rel_perturbation < 0.0 || cfg.rel_perturbation >= 1.0) {
    throw Error("sheaf relative perturbation must be in [0, 1)");
  }
  if (eq.cls != EquilibriumClass::kOrbital || eq.xi1 <= 0.0) {
    throw DegenerateAttitude("sheaf requires an orbital-class equilibrium");
  }

  const PhaseState base = phase_from_equilibrium(eq, prob);
  const double period = 2.0 * 3.14159265358979323846 / eq.xi1;

  SheafSummary summary;
  summary.outcomes.resize(cfg.n_samples);

  if (cfg.parallel) {
#ifdef ORBITRON_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < cfg.n_samples; ++i) {
      summary.outcomes[i] = run_sample(i, base, eq, prob, cfg, period);
    }
  } else {
    for (int i = 0; i < cfg.n_samples; ++i) {
      summary.outcomes[i] = run_sample(i, base, eq, prob, cfg, period);
    }
  }

  double min_escape = 0.0;
  for (const TrajectoryOutcome& o : summary.outcomes) {
    switch (o.classification) {
      case Outcome::kBounded:
        ++summary.n_bounded;
        summary.max_window_dev =
            std::max({summary.max_window_dev, o.max_radial_dev, o.max_axial_dev});
        break;
      case Outcome::kEscaped:
        ++summary.n_escaped;
        min_escape = min_escape == 0.0 ? o.turns_completed
                                       : std::min(min_escape, o.turns_completed);
        break;
      case Outcome::kPoleCollision:
        ++summary.n_pole_collision;
        min_escape = min_escape == 0.0 ? o.turns_completed
                                       : std::min(min_escape, o.turns_completed);
        break;
    }
  }
  summary.min_turns_to_escape = min_escape;
  return summary;
}

}  // namespace orbitron
