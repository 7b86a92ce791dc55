#pragma once

#include <optional>
#include <string>

#include "sirtoc/sweep.hpp"

namespace sirtoc {

enum class Subcommand { Simulate, Optimize, VerifyPmp, Map, Curves };

const char* to_string(Subcommand cmd);
Subcommand subcommand_from_string(const std::string& name);

/// Everything a run needs. Defaults reproduce the standard scenario:
/// S0=2000, I0=1, mu=5, eps=0.5, beta=0.0075 (R0=3).
struct RunConfig {
  Subcommand cmd = Subcommand::Optimize;

  ModelParams params{0.0075, 5.0, 2000.0, 1.0, 0.5};
  PolicyKind policy = PolicyKind::Vaccination;
  double u_max = 1.0;

  double tau = 0.0;  // simulate only
  IntegratorOverrides integrator;
  int mesh_count = kDefaultMeshCount;

  // map axes; curves reuse u_lo/u_hi/n_points
  SweepAxis x_axis = SweepAxis::UMax;
  double x_lo = 0.5;
  double x_hi = 10.0;
  int n_x = 60;
  double r0_lo = 1.1;
  double r0_hi = 5.0;
  int n_y = 60;
  double u_fixed = 1.0;

  double u_lo = 0.05;
  double u_hi = 10.0;
  int n_points = 200;

  std::string out_prefix = "out";
  bool csv = true;
  bool svg = false;
  bool dump_adjoint = false;
  int workers = 0;  // 0 = hardware default

  bool operator==(const RunConfig&) const = default;

  void validate() const;
  SweepSpec sweep_spec() const;
};

/// Command-line values that may override file values; absent means
/// "not given on the command line".
struct FlagOverrides {
  std::optional<double> beta, r0v, mu, s0, i0, eps, u_max, tau;
  std::optional<double> dt, t_horizon, newton_tol;
  std::optional<std::string> policy, x_axis, out_prefix;
  std::optional<double> x_lo, x_hi, r0_lo, r0_hi, u_fixed, u_lo, u_hi;
  std::optional<int> mesh_count, n_x, n_y, n_points, workers, newton_max_iter;
  std::optional<bool> svg, dump_adjoint;
};

/// Builds a validated RunConfig with precedence flags > file > defaults.
/// file_json, when present, must be a JSON object; unknown keys are errors
/// naming the key, invalid values are errors naming the field.
RunConfig parse_config(Subcommand cmd, const std::optional<std::string>& file_json,
                       const FlagOverrides& flags);

std::string serialize_config(const RunConfig& cfg);

/// Executes the subcommand: writes the output files next to out_prefix and
/// prints a one-line summary. Throws on I/O or integration failure.
void run(const RunConfig& cfg);

/// run() wrapped into exit-code categories: 0 ok, 1 bad config,
/// 2 I/O failure, 3 integration/optimization failure.
int run_cli(const RunConfig& cfg);

}  // namespace sirtoc
