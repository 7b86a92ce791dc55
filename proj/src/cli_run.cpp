#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sirtoc/pmp_verify.hpp"
#include "sirtoc/run_config.hpp"

namespace sirtoc {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

struct WorkerGuard {
  // run() honours cfg.workers by funnelling it through the same env var the
  // pool reads, then restores the previous value.
  std::string saved;
  bool had = false;
  explicit WorkerGuard(int workers) {
    if (workers <= 0) return;
    if (const char* old = std::getenv("SIRTOC_WORKERS")) {
      saved = old;
      had = true;
    }
    setenv("SIRTOC_WORKERS", std::to_string(workers).c_str(), 1);
    active = true;
  }
  ~WorkerGuard() {
    if (!active) return;
    if (had) setenv("SIRTOC_WORKERS", saved.c_str(), 1);
    else unsetenv("SIRTOC_WORKERS");
  }
  bool active = false;
};

void run_simulate(const RunConfig& cfg) {
  const Policy pol = Policy::make(cfg.policy, cfg.u_max);
  const IntegratorConfig icfg = cfg.integrator.resolve(cfg.params, pol);
  const Trajectory traj = simulate(cfg.params, pol, {cfg.tau, pol.u_max}, icfg);

  const std::string path = cfg.out_prefix + "_trajectory.csv";
  auto out = open_out(path);
  write_trajectory_csv(traj, out);
  finish(out, path);

  if (traj.eradication_time) {
    std::printf("simulate: T=%.10g tau=%.10g S(T)=%.10g points=%zu -> %s\n",
                *traj.eradication_time, cfg.tau, traj.states.back().s, traj.times.size(),
                path.c_str());
  } else {
    std::printf("simulate: horizon %.10g exhausted before eradication -> %s\n", icfg.t_horizon,
                path.c_str());
  }
}

OptimalResult run_optimize_common(const RunConfig& cfg, IntegratorConfig& icfg_out) {
  const Policy pol = Policy::make(cfg.policy, cfg.u_max);
  const IntegratorConfig icfg = cfg.integrator.resolve(cfg.params, pol);
  icfg_out = icfg;
  return optimize(cfg.params, pol, cfg.mesh_count, icfg);
}

void write_optimal_files(const RunConfig& cfg, const OptimalResult& res) {
  const Policy pol = Policy::make(cfg.policy, cfg.u_max);
  const std::string rpath = cfg.out_prefix + "_optimal.csv";
  auto rout = open_out(rpath);
  write_result_csv_header(rout);
  write_result_csv_row(cfg.params, pol, res, rout);
  finish(rout, rpath);

  const std::string tpath = cfg.out_prefix + "_trajectory.csv";
  auto tout = open_out(tpath);
  write_trajectory_csv(res.trajectory, tout);
  finish(tout, tpath);
}

void run_optimize(const RunConfig& cfg) {
  IntegratorConfig icfg;
  const OptimalResult res = run_optimize_common(cfg, icfg);
  write_optimal_files(cfg, res);
  std::printf("optimize: tau_star=%.10g T_star=%.10g T_at_zero=%.10g T_unc=%.10g regime=%s\n",
              res.tau_star, res.T_star, res.T_at_zero, res.t_unc, to_string(res.regime));
}

void run_verify_pmp(const RunConfig& cfg) {
  IntegratorConfig icfg;
  const OptimalResult res = run_optimize_common(cfg, icfg);
  const Policy pol = Policy::make(cfg.policy, cfg.u_max);
  const PmpReport rep = check_pmp(cfg.params, pol, res, icfg);

  write_optimal_files(cfg, res);
  const std::string rpath = cfg.out_prefix + "_pmp_report.csv";
  auto rout = open_out(rpath);
  write_report_csv(rep, rout);
  finish(rout, rpath);

  if (cfg.dump_adjoint) {
    const AdjointTrajectory adj = adjoint_backward(cfg.params, pol, res.trajectory, icfg);
    const std::string apath = cfg.out_prefix + "_adjoint.csv";
    auto aout = open_out(apath);
    write_adjoint_csv(adj, aout);
    finish(aout, apath);
  }

  std::printf("verify-pmp: tau_star=%.10g T_star=%.10g regime=%s verdict=%s "
              "(|H|max=%.3g crossings=%d)\n",
              res.tau_star, res.T_star, to_string(res.regime), rep.all_ok() ? "pass" : "FAIL",
              rep.max_abs_hamiltonian, rep.crossing_count);
}

void run_map(const RunConfig& cfg) {
  const RegimeMap map = sirtoc::run_map(cfg.sweep_spec());

  const std::string cpath = cfg.out_prefix + "_map.csv";
  auto cout_ = open_out(cpath);
  write_map_csv(map, cout_);
  finish(cout_, cpath);
  if (cfg.svg) {
    const std::string spath = cfg.out_prefix + "_map.svg";
    auto sout = open_out(spath);
    write_map_svg(map, sout);
    finish(sout, spath);
  }

  std::size_t failed = 0;
  for (const auto& cell : map.cells) failed += cell.failed ? 1 : 0;
  std::printf("map: %dx%d cells written to %s (%zu failed)\n", map.spec.n_x, map.spec.n_y,
              cpath.c_str(), failed);
}

void run_curves(const RunConfig& cfg) {
  const CurveTable table =
      sirtoc::run_curves(cfg.policy, cfg.params, cfg.u_lo, cfg.u_hi, cfg.n_points,
                         cfg.mesh_count, cfg.integrator);

  const std::string cpath = cfg.out_prefix + "_curves.csv";
  auto out = open_out(cpath);
  write_curve_csv(table, out);
  finish(out, cpath);

  const auto rec = detect_transition(table);
  if (rec) {
    std::printf("curves: %zu points -> %s; transition between u_max=%.10g and %.10g "
                "(tau drop %.10g, dT*=%.3g)\n",
                table.points.size(), cpath.c_str(), rec->u_before, rec->u_after, rec->tau_drop,
                rec->dT_star);
  } else {
    std::printf("curves: %zu points -> %s; no catastrophic transition detected\n",
                table.points.size(), cpath.c_str());
  }
}

}  // namespace

void run(const RunConfig& cfg) {
  cfg.validate();
  WorkerGuard guard(cfg.workers);
  switch (cfg.cmd) {
    case Subcommand::Simulate: run_simulate(cfg); return;
    case Subcommand::Optimize: run_optimize(cfg); return;
    case Subcommand::VerifyPmp: run_verify_pmp(cfg); return;
    case Subcommand::Map: run_map(cfg); return;
    case Subcommand::Curves: run_curves(cfg); return;
  }
  throw std::logic_error("run: unreachable subcommand");
}

int run_cli(const RunConfig& cfg) {
  try {
    run(cfg);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IntegrationError& e) {
    std::cerr << "integration error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sirtoc
