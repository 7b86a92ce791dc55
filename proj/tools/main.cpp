#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sirtoc/run_config.hpp"

namespace {

struct CliState {
  sirtoc::FlagOverrides flags;
  std::string config_path;
  bool svg = false;
  bool dump_adjoint = false;
};

void add_common_flags(CLI::App* cmd, CliState& st) {
  cmd->add_option("--config", st.config_path, "JSON config file (flags win over file values)");
  cmd->add_option("--beta", st.flags.beta, "transmission rate");
  cmd->add_option("--r0", st.flags.r0v, "basic reproduction number; sets beta = r0*mu/s0");
  cmd->add_option("--mu", st.flags.mu, "removal rate");
  cmd->add_option("--s0", st.flags.s0, "initial susceptibles");
  cmd->add_option("--i0", st.flags.i0, "initial infected");
  cmd->add_option("--eps", st.flags.eps, "eradication threshold");
  cmd->add_option("--policy", st.flags.policy, "vaccination|isolation|culling|reduction");
  cmd->add_option("--umax", st.flags.u_max, "maximum control rate");
  cmd->add_option("--dt", st.flags.dt, "step size override");
  cmd->add_option("--horizon", st.flags.t_horizon, "time horizon override");
  cmd->add_option("--newton-tol", st.flags.newton_tol, "implicit-step tolerance");
  cmd->add_option("--mesh", st.flags.mesh_count, "tau mesh points");
  cmd->add_option("--out", st.flags.out_prefix, "output path prefix");
  cmd->add_option("--workers", st.flags.workers, "cap on worker threads (also SIRTOC_WORKERS)");
}

int dispatch(sirtoc::Subcommand cmd, CliState& st) {
  std::optional<std::string> file_text;
  if (!st.config_path.empty()) {
    std::ifstream in(st.config_path);
    if (!in) {
      std::cerr << "error: cannot read config file '" << st.config_path << "'\n";
      return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    file_text = buf.str();
  }
  if (st.svg) st.flags.svg = true;
  if (st.dump_adjoint) st.flags.dump_adjoint = true;

  sirtoc::RunConfig cfg;
  try {
    cfg = sirtoc::parse_config(cmd, file_text, st.flags);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  return sirtoc::run_cli(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal bang-bang control of SIR outbreaks"};
  app.require_subcommand(1);

  CliState st;
  int rc = 0;

  auto* sim = app.add_subcommand("simulate", "integrate one schedule and dump the trajectory");
  add_common_flags(sim, st);
  sim->add_option("--tau", st.flags.tau, "starting intervention time");
  sim->callback([&] { rc = dispatch(sirtoc::Subcommand::Simulate, st); });

  auto* opt = app.add_subcommand("optimize", "minimize the eradication time over the tau mesh");
  add_common_flags(opt, st);
  opt->callback([&] { rc = dispatch(sirtoc::Subcommand::Optimize, st); });

  auto* ver = app.add_subcommand("verify-pmp", "optimize, then check the optimality conditions");
  add_common_flags(ver, st);
  ver->add_flag("--dump-adjoint", st.dump_adjoint, "also write the costate trajectory CSV");
  ver->callback([&] { rc = dispatch(sirtoc::Subcommand::VerifyPmp, st); });

  auto* map = app.add_subcommand("map", "regime map over a parameter grid");
  add_common_flags(map, st);
  map->add_option("--x-axis", st.flags.x_axis, "umax|i0");
  map->add_option("--x-lo", st.flags.x_lo, "x axis lower end");
  map->add_option("--x-hi", st.flags.x_hi, "x axis upper end");
  map->add_option("--nx", st.flags.n_x, "x axis points");
  map->add_option("--r0-lo", st.flags.r0_lo, "R0 axis lower end");
  map->add_option("--r0-hi", st.flags.r0_hi, "R0 axis upper end");
  map->add_option("--ny", st.flags.n_y, "R0 axis points");
  map->add_option("--u-fixed", st.flags.u_fixed, "u_max when the x axis is i0");
  map->add_flag("--svg", st.svg, "also render the map as SVG");
  map->callback([&] { rc = dispatch(sirtoc::Subcommand::Map, st); });

  auto* cur = app.add_subcommand("curves", "optimal times and final sizes along a u_max sweep");
  add_common_flags(cur, st);
  cur->add_option("--u-lo", st.flags.u_lo, "u_max sweep lower end");
  cur->add_option("--u-hi", st.flags.u_hi, "u_max sweep upper end");
  cur->add_option("--points", st.flags.n_points, "sweep points");
  cur->callback([&] { rc = dispatch(sirtoc::Subcommand::Curves, st); });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
