#include "sirtoc/run_config.hpp"

#include <set>

#include <json.hpp>

namespace sirtoc {

using nlohmann::json;

const char* to_string(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::Simulate: return "simulate";
    case Subcommand::Optimize: return "optimize";
    case Subcommand::VerifyPmp: return "verify-pmp";
    case Subcommand::Map: return "map";
    case Subcommand::Curves: return "curves";
  }
  return "unknown";
}

Subcommand subcommand_from_string(const std::string& name) {
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "optimize") return Subcommand::Optimize;
  if (name == "verify-pmp" || name == "verify_pmp") return Subcommand::VerifyPmp;
  if (name == "map") return Subcommand::Map;
  if (name == "curves") return Subcommand::Curves;
  throw std::invalid_argument("unknown subcommand '" + name + "'");
}

void RunConfig::validate() const {
  params.validate();
  Policy::make(policy, u_max);  // validates the pair
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (mesh_count < 2) throw std::invalid_argument("mesh_count must be >= 2");
  if (integrator.dt && !(*integrator.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (integrator.t_horizon && !(*integrator.t_horizon > 0.0)) {
    throw std::invalid_argument("t_horizon must be > 0");
  }
  if (workers < 0) throw std::invalid_argument("workers must be >= 0");
  if (out_prefix.empty()) throw std::invalid_argument("out prefix must not be empty");
  if (cmd == Subcommand::Map) sweep_spec().validate();
  if (cmd == Subcommand::Curves) {
    if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
    if (!(u_lo >= 0.0) || !(u_lo <= u_hi)) {
      throw std::invalid_argument("u range must satisfy 0 <= u_lo <= u_hi");
    }
  }
}

SweepSpec RunConfig::sweep_spec() const {
  SweepSpec spec;
  spec.kind = policy;
  spec.s0 = params.s0;
  spec.i0 = params.i0;
  spec.mu = params.mu;
  spec.eps = params.epsilon;
  spec.x_axis = x_axis;
  spec.x_lo = x_lo;
  spec.x_hi = x_hi;
  spec.n_x = n_x;
  spec.r0_lo = r0_lo;
  spec.r0_hi = r0_hi;
  spec.n_y = n_y;
  spec.u_max_fixed = u_fixed;
  spec.mesh_count = mesh_count;
  spec.integrator = integrator;
  return spec;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "subcommand", "beta", "mu", "s0", "i0", "eps", "policy", "u_max", "tau",
      "dt", "t_horizon", "newton_tol", "newton_max_iter", "mesh_count",
      "x_axis", "x_lo", "x_hi", "n_x", "r0_lo", "r0_hi", "n_y", "u_fixed",
      "u_lo", "u_hi", "n_points", "out", "csv", "svg", "dump_adjoint", "workers"};
  return keys;
}

double want_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) throw std::invalid_argument(key + " must be a number");
  return j.at(key).get<double>();
}

int want_int(const json& j, const std::string& key) {
  if (!j.at(key).is_number_integer()) throw std::invalid_argument(key + " must be an integer");
  return j.at(key).get<int>();
}

bool want_bool(const json& j, const std::string& key) {
  if (!j.at(key).is_boolean()) throw std::invalid_argument(key + " must be a boolean");
  return j.at(key).get<bool>();
}

std::string want_string(const json& j, const std::string& key) {
  if (!j.at(key).is_string()) throw std::invalid_argument(key + " must be a string");
  return j.at(key).get<std::string>();
}

void apply_file(RunConfig& cfg, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }

  if (j.contains("subcommand")) cfg.cmd = subcommand_from_string(want_string(j, "subcommand"));
  if (j.contains("beta")) cfg.params.beta = want_number(j, "beta");
  if (j.contains("mu")) cfg.params.mu = want_number(j, "mu");
  if (j.contains("s0")) cfg.params.s0 = want_number(j, "s0");
  if (j.contains("i0")) cfg.params.i0 = want_number(j, "i0");
  if (j.contains("eps")) cfg.params.epsilon = want_number(j, "eps");
  if (j.contains("policy")) cfg.policy = policy_kind_from_string(want_string(j, "policy"));
  if (j.contains("u_max")) cfg.u_max = want_number(j, "u_max");
  if (j.contains("tau")) cfg.tau = want_number(j, "tau");
  if (j.contains("dt")) cfg.integrator.dt = want_number(j, "dt");
  if (j.contains("t_horizon")) cfg.integrator.t_horizon = want_number(j, "t_horizon");
  if (j.contains("newton_tol")) cfg.integrator.newton_tol = want_number(j, "newton_tol");
  if (j.contains("newton_max_iter")) cfg.integrator.newton_max_iter = want_int(j, "newton_max_iter");
  if (j.contains("mesh_count")) cfg.mesh_count = want_int(j, "mesh_count");
  if (j.contains("x_axis")) cfg.x_axis = sweep_axis_from_string(want_string(j, "x_axis"));
  if (j.contains("x_lo")) cfg.x_lo = want_number(j, "x_lo");
  if (j.contains("x_hi")) cfg.x_hi = want_number(j, "x_hi");
  if (j.contains("n_x")) cfg.n_x = want_int(j, "n_x");
  if (j.contains("r0_lo")) cfg.r0_lo = want_number(j, "r0_lo");
  if (j.contains("r0_hi")) cfg.r0_hi = want_number(j, "r0_hi");
  if (j.contains("n_y")) cfg.n_y = want_int(j, "n_y");
  if (j.contains("u_fixed")) cfg.u_fixed = want_number(j, "u_fixed");
  if (j.contains("u_lo")) cfg.u_lo = want_number(j, "u_lo");
  if (j.contains("u_hi")) cfg.u_hi = want_number(j, "u_hi");
  if (j.contains("n_points")) cfg.n_points = want_int(j, "n_points");
  if (j.contains("out")) cfg.out_prefix = want_string(j, "out");
  if (j.contains("csv")) cfg.csv = want_bool(j, "csv");
  if (j.contains("svg")) cfg.svg = want_bool(j, "svg");
  if (j.contains("dump_adjoint")) cfg.dump_adjoint = want_bool(j, "dump_adjoint");
  if (j.contains("workers")) cfg.workers = want_int(j, "workers");
}

void apply_flags(RunConfig& cfg, const FlagOverrides& f) {
  if (f.beta && f.r0v) throw std::invalid_argument("give either beta or r0, not both");
  if (f.mu) cfg.params.mu = *f.mu;
  if (f.s0) cfg.params.s0 = *f.s0;
  if (f.i0) cfg.params.i0 = *f.i0;
  if (f.eps) cfg.params.epsilon = *f.eps;
  if (f.beta) cfg.params.beta = *f.beta;
  if (f.r0v) cfg.params.beta = *f.r0v * cfg.params.mu / cfg.params.s0;
  if (f.policy) cfg.policy = policy_kind_from_string(*f.policy);
  if (f.u_max) cfg.u_max = *f.u_max;
  if (f.tau) cfg.tau = *f.tau;
  if (f.dt) cfg.integrator.dt = *f.dt;
  if (f.t_horizon) cfg.integrator.t_horizon = *f.t_horizon;
  if (f.newton_tol) cfg.integrator.newton_tol = *f.newton_tol;
  if (f.newton_max_iter) cfg.integrator.newton_max_iter = *f.newton_max_iter;
  if (f.mesh_count) cfg.mesh_count = *f.mesh_count;
  if (f.x_axis) cfg.x_axis = sweep_axis_from_string(*f.x_axis);
  if (f.x_lo) cfg.x_lo = *f.x_lo;
  if (f.x_hi) cfg.x_hi = *f.x_hi;
  if (f.n_x) cfg.n_x = *f.n_x;
  if (f.r0_lo) cfg.r0_lo = *f.r0_lo;
  if (f.r0_hi) cfg.r0_hi = *f.r0_hi;
  if (f.n_y) cfg.n_y = *f.n_y;
  if (f.u_fixed) cfg.u_fixed = *f.u_fixed;
  if (f.u_lo) cfg.u_lo = *f.u_lo;
  if (f.u_hi) cfg.u_hi = *f.u_hi;
  if (f.n_points) cfg.n_points = *f.n_points;
  if (f.out_prefix) cfg.out_prefix = *f.out_prefix;
  if (f.svg) cfg.svg = *f.svg;
  if (f.dump_adjoint) cfg.dump_adjoint = *f.dump_adjoint;
  if (f.workers) cfg.workers = *f.workers;
}

}  // namespace

RunConfig parse_config(Subcommand cmd, const std::optional<std::string>& file_json,
                       const FlagOverrides& flags) {
  RunConfig cfg;
  if (file_json) apply_file(cfg, *file_json);
  cfg.cmd = cmd;  // the command line names the subcommand; a file may only repeat it
  apply_flags(cfg, flags);
  cfg.validate();
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["subcommand"] = to_string(cfg.cmd);
  j["beta"] = cfg.params.beta;
  j["mu"] = cfg.params.mu;
  j["s0"] = cfg.params.s0;
  j["i0"] = cfg.params.i0;
  j["eps"] = cfg.params.epsilon;
  j["policy"] = to_string(cfg.policy);
  j["u_max"] = cfg.u_max;
  j["tau"] = cfg.tau;
  if (cfg.integrator.dt) j["dt"] = *cfg.integrator.dt;
  if (cfg.integrator.t_horizon) j["t_horizon"] = *cfg.integrator.t_horizon;
  if (cfg.integrator.newton_tol) j["newton_tol"] = *cfg.integrator.newton_tol;
  if (cfg.integrator.newton_max_iter) j["newton_max_iter"] = *cfg.integrator.newton_max_iter;
  j["mesh_count"] = cfg.mesh_count;
  j["x_axis"] = to_string(cfg.x_axis);
  j["x_lo"] = cfg.x_lo;
  j["x_hi"] = cfg.x_hi;
  j["n_x"] = cfg.n_x;
  j["r0_lo"] = cfg.r0_lo;
  j["r0_hi"] = cfg.r0_hi;
  j["n_y"] = cfg.n_y;
  j["u_fixed"] = cfg.u_fixed;
  j["u_lo"] = cfg.u_lo;
  j["u_hi"] = cfg.u_hi;
  j["n_points"] = cfg.n_points;
  j["out"] = cfg.out_prefix;
  j["csv"] = cfg.csv;
  j["svg"] = cfg.svg;
  j["dump_adjoint"] = cfg.dump_adjoint;
  j["workers"] = cfg.workers;
  return j.dump(2);
}

}  // namespace sirtoc
