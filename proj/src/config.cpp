#include "orbitron/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace orbitron {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

struct BodyAccum {
  std::optional<double> mass, moment, i_perp, i_axial;
  std::optional<double> density, diameter, height, residual_induction;
};

void assign(RunConfig* cfg, BodyAccum* body, const std::string& key,
            const std::string& value, const std::string& where) {
  auto num = [&] { return to_double(value, where); };
  if (key == "field.kappa") cfg->field.orbitron.kappa = num();
  else if (key == "field.h") cfg->field.orbitron.h = num();
  else if (key == "field.b0") cfg->field.linear.b0 = num();
  else if (key == "field.b_prime") cfg->field.linear.b_prime = num();
  else if (key == "body.mass") body->mass = num();
  else if (key == "body.moment") body->moment = num();
  else if (key == "body.i_perp") body->i_perp = num();
  else if (key == "body.i_axial") body->i_axial = num();
  else if (key == "body.density") body->density = num();
  else if (key == "body.diameter") body->diameter = num();
  else if (key == "body.height") body->height = num();
  else if (key == "body.residual_induction") body->residual_induction = num();
  else if (key == "orbit.r0") cfg->r0 = num();
  else if (key == "orbit.g") cfg->g = num();
  else if (key == "integrator.method") {
    if (value == "rk4") cfg->integrator_method = IntegratorMethod::kRk4Fixed;
    else if (value == "adaptive") cfg->integrator_method = IntegratorMethod::kCashKarpAdaptive;
    else throw ConfigError(where + ": unknown integrator method '" + value + "'");
  } else if (key == "integrator.steps_per_turn") cfg->steps_per_turn = to_int(value, where);
  else if (key == "integrator.rtol") cfg->rtol = num();
  else if (key == "integrator.atol") cfg->atol = num();
  else if (key == "integrator.renormalize_mu") cfg->renormalize_mu = to_bool(value, where);
  else if (key == "integrator.record_stride") cfg->record_stride = to_int(value, where);
  else if (key == "sheaf.samples") cfg->sheaf.n_samples = to_int(value, where);
  else if (key == "sheaf.rel_perturbation") cfg->sheaf.rel_perturbation = num();
  else if (key == "sheaf.turns") cfg->sheaf.n_turns = num();
  else if (key == "sheaf.seed") {
    try {
      size_t pos = 0;
      cfg->sheaf.seed = std::stoull(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ConfigError(where + ": expected an unsigned integer, got '" + value + "'");
    }
  }
  else if (key == "sheaf.max_radial_frac") cfg->sheaf.max_radial_frac = num();
  else if (key == "sheaf.max_axial_frac") cfg->sheaf.max_axial_frac = num();
  else if (key == "sheaf.pole_guard_mult") cfg->sheaf.pole_guard_mult = num();
  else if (key == "sheaf.escape_radius_frac") cfg->sheaf.escape_radius_frac = num();
  else if (key == "sheaf.parallel") cfg->sheaf.parallel = to_bool(value, where);
  else if (key == "reference.alpha") cfg->reference.alpha = num();
  else if (key == "reference.b1") cfg->reference.b1 = num();
  else if (key == "reference.b3") cfg->reference.b3 = num();
  else if (key == "reference.xi1") cfg->reference.xi1 = num();
  else if (key == "reference.xi2_tilde") cfg->reference.xi2_tilde = num();
  else if (key == "reference.nu1") cfg->reference.nu1 = num();
  else if (key == "reference.nu3") cfg->reference.nu3 = num();
  else if (key == "reference.pi1") cfg->reference.pi1 = num();
  else if (key == "reference.pi3") cfg->reference.pi3 = num();
  else if (key == "output.dir") cfg->output_dir = value;
  else throw ConfigError(where + ": unknown key '" + key + "'");
}

void finish_body(RunConfig* cfg, const BodyAccum& b, const std::string& origin) {
  const bool explicit_given = b.mass || b.moment || b.i_perp || b.i_axial;
  const bool disk_given = b.density || b.diameter || b.height || b.residual_induction;
  if (explicit_given && disk_given) {
    throw ConfigError(origin + ": give either explicit body parameters or disk geometry, not both");
  }
  if (explicit_given) {
    if (!(b.mass && b.moment && b.i_perp && b.i_axial)) {
      throw ConfigError(origin + ": explicit body needs body.mass, body.moment, body.i_perp, body.i_axial");
    }
    cfg->body_explicit = BodyParams{*b.mass, *b.moment, *b.i_perp, *b.i_axial};
    cfg->body_disk.reset();
  } else if (disk_given) {
    if (!(b.density && b.diameter && b.height && b.residual_induction)) {
      throw ConfigError(origin + ": disk body needs body.density, body.diameter, body.height, body.residual_induction");
    }
    cfg->body_disk = DiskGeometry{*b.density, *b.diameter, *b.height, *b.residual_induction};
    cfg->body_explicit.reset();
  }
}

}  // namespace

BodyParams RunConfig::body() const {
  if (body_explicit) return *body_explicit;
  if (body_disk) return body_from_disk(*body_disk);
  throw ConfigError("no body parameters configured");
}

EquilibriumProblem RunConfig::problem() const {
  EquilibriumProblem prob;
  prob.field = field;
  prob.body = body();
  prob.r0 = r0;
  prob.g = g;
  return prob;
}

void RunConfig::validate() const {
  if (static_cast<bool>(body_explicit) == static_cast<bool>(body_disk)) {
    throw ConfigError("exactly one of explicit body parameters or disk geometry required");
  }
  problem().validate();
  if (steps_per_turn < 16) throw ConfigError("integrator.steps_per_turn too small");
  if (sheaf.n_samples < 1) throw ConfigError("sheaf.samples must be >= 1");
  if (sheaf.rel_perturbation < 0.0 || sheaf.rel_perturbation >= 1.0) {
    throw ConfigError("sheaf.rel_perturbation must be in [0,1)");
  }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  BodyAccum body;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(where + ": empty key or value");
    }
    assign(&cfg, &body, key, value, where);
  }
  finish_body(&cfg, body, origin);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void apply_override(RunConfig* cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "': expected key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));

  // body keys switch the description; rebuild the accumulator from the
  // current state so a single-key override keeps the other components.
  BodyAccum body;
  if (cfg->body_explicit) {
    body.mass = cfg->body_explicit->mass;
    body.moment = cfg->body_explicit->moment;
    body.i_perp = cfg->body_explicit->i_perp;
    body.i_axial = cfg->body_explicit->i_axial;
  }
  if (cfg->body_disk) {
    body.density = cfg->body_disk->density;
    body.diameter = cfg->body_disk->diameter;
    body.height = cfg->body_disk->height;
    body.residual_induction = cfg->body_disk->residual_induction;
  }
  assign(cfg, &body, key, value, "override '" + assignment + "'");
  finish_body(cfg, body, "override '" + assignment + "'");
}

std::map<std::string, std::string> config_keys(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  auto put = [&out](const std::string& k, double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    out[k] = ss.str();
  };
  put("field.kappa", cfg.field.orbitron.kappa);
  put("field.h", cfg.field.orbitron.h);
  put("field.b0", cfg.field.linear.b0);
  put("field.b_prime", cfg.field.linear.b_prime);
  if (cfg.body_explicit) {
    put("body.mass", cfg.body_explicit->mass);
    put("body.moment", cfg.body_explicit->moment);
    put("body.i_perp", cfg.body_explicit->i_perp);
    put("body.i_axial", cfg.body_explicit->i_axial);
  }
  if (cfg.body_disk) {
    put("body.density", cfg.body_disk->density);
    put("body.diameter", cfg.body_disk->diameter);
    put("body.height", cfg.body_disk->height);
    put("body.residual_induction", cfg.body_disk->residual_induction);
  }
  put("orbit.r0", cfg.r0);
  put("orbit.g", cfg.g);
  out["integrator.method"] =
      cfg.integrator_method == IntegratorMethod::kRk4Fixed ? "rk4" : "adaptive";
  put("integrator.steps_per_turn", cfg.steps_per_turn);
  put("sheaf.samples", cfg.sheaf.n_samples);
  put("sheaf.rel_perturbation", cfg.sheaf.rel_perturbation);
  put("sheaf.turns", cfg.sheaf.n_turns);
  put("sheaf.seed", static_cast<double>(cfg.sheaf.seed));
  return out;
}

}  // namespace orbitron
