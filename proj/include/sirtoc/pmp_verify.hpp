#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "sirtoc/timeopt.hpp"

namespace sirtoc {

/// Costate record on the same grid as the forward trajectory, filled by a
/// backward pass. lambda_s vanishes at the terminal time; lambda_i there is
/// -1/dI/dt so that the Hamiltonian is zero at the endpoint.
struct AdjointTrajectory {
  std::vector<double> times;
  std::vector<double> lambda_s;
  std::vector<double> lambda_i;
  std::vector<double> psi;          // switching function per grid point
  std::vector<double> hamiltonian;  // H per grid point
};

/// psi = lambda . g(x) for the policy's control term. Positive forces u = 0,
/// negative forces u = u_max along an optimal pair.
double switching_function(const ModelParams& p, const Policy& pol, const State& x,
                          double lambda_s, double lambda_i);

/// H = 1 + lambda . (f(x) + u g(x)). Linear in u: H(u) - H(0) = u * psi.
double hamiltonian(const ModelParams& p, const Policy& pol, const State& x, double lambda_s,
                   double lambda_i, double u);

/// Integrates the policy's adjoint system backward along a finished run with
/// the same trapezoidal discretization and the recorded controls. Requires an
/// eradication time and a strictly decreasing I at the endpoint.
AdjointTrajectory adjoint_backward(const ModelParams& p, const Policy& pol,
                                   const Trajectory& traj, const IntegratorConfig& cfg);

struct PmpReport {
  double ham_tol = 0.0;
  double psi_tol = 0.0;

  double max_abs_hamiltonian = 0.0;
  bool hamiltonian_ok = false;

  int sign_violations = 0;  // grid points where sign(psi) contradicts the applied control
  bool sign_consistency_ok = false;

  int crossing_count = 0;
  double crossing_time = std::numeric_limits<double>::quiet_NaN();
  bool crossing_ok = false;  // at most one, positive -> negative

  double transversality_residual = 0.0;  // |lambda_s(T)|, zero by construction
  bool transversality_ok = false;

  double max_psi_controlled = 0.0;  // max psi strictly after tau_star
  bool controlled_segment_ok = false;

  bool all_ok() const {
    return hamiltonian_ok && sign_consistency_ok && crossing_ok && transversality_ok &&
           controlled_segment_ok;
  }
};

/// Evaluates the first-order optimality conditions along a candidate optimum.
/// Failures land in the report; only a malformed candidate throws.
PmpReport check_pmp(const ModelParams& p, const Policy& pol, const OptimalResult& result,
                    const IntegratorConfig& cfg);

void write_report_csv(const PmpReport& report, std::ostream& out);
void write_adjoint_csv(const AdjointTrajectory& adj, std::ostream& out);

}  // namespace sirtoc
