#include "sirtoc/pmp_verify.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sirtoc {

namespace {

struct Mat2 {
  double a11, a12, a21, a22;
};

// Coefficient matrix of the linear adjoint system lambda' = A(x,u) lambda.
Mat2 adjoint_matrix(const ModelParams& p, const Policy& pol, const State& x, double u) {
  if (pol.kind == PolicyKind::TransmissionReduction) {
    const double be = p.beta * (1.0 - u);
    return {be * x.i, -be * x.i, be * x.s, p.mu - be * x.s};
  }
  return {p.beta * x.i + pol.alpha1 * u, -p.beta * x.i,
          p.beta * x.s, p.mu + pol.alpha2 * u - p.beta * x.s};
}

double terminal_di_dt(const ModelParams& p, const Policy& pol, const Trajectory& traj) {
  const State& xT = traj.states.back();
  const double uT = traj.controls.back();
  return detail::field_raw(p, pol, xT.s, xT.i, uT).di;
}

}  // namespace

double switching_function(const ModelParams& p, const Policy& pol, const State& x,
                          double lambda_s, double lambda_i) {
  if (pol.kind == PolicyKind::TransmissionReduction) {
    return (lambda_s - lambda_i) * p.beta * x.s * x.i;
  }
  return -pol.alpha1 * x.s * lambda_s - pol.alpha2 * x.i * lambda_i;
}

double hamiltonian(const ModelParams& p, const Policy& pol, const State& x, double lambda_s,
                   double lambda_i, double u) {
  const Deriv f = detail::field_raw(p, pol, x.s, x.i, u);
  return 1.0 + lambda_s * f.ds + lambda_i * f.di;
}

AdjointTrajectory adjoint_backward(const ModelParams& p, const Policy& pol,
                                   const Trajectory& traj, const IntegratorConfig& cfg) {
  p.validate();
  pol.validate();
  if (!traj.eradication_time) {
    throw std::invalid_argument("adjoint_backward: trajectory has no eradication time");
  }
  const std::size_t n = traj.times.size();
  if (n < 2) throw std::invalid_argument("adjoint_backward: trajectory too short");

  const double di_T = terminal_di_dt(p, pol, traj);
  if (!(di_T < 0.0)) {
    throw IntegrationError(
        "adjoint_backward: I is not decreasing at the terminal point; the threshold crossing "
        "looks like a detection artifact");
  }

  AdjointTrajectory adj;
  adj.times = traj.times;
  adj.lambda_s.assign(n, 0.0);
  adj.lambda_i.assign(n, 0.0);
  adj.psi.assign(n, 0.0);
  adj.hamiltonian.assign(n, 0.0);

  adj.lambda_s[n - 1] = 0.0;
  adj.lambda_i[n - 1] = -1.0 / di_T;

  const double dt = traj.dt;
  for (std::size_t k = n - 1; k-- > 0;) {
    const Mat2 ak = adjoint_matrix(p, pol, traj.states[k], traj.controls[k]);
    const Mat2 an = adjoint_matrix(p, pol, traj.states[k + 1], traj.controls[k + 1]);
    // (I + dt/2 A_k) lambda_k = (I - dt/2 A_{k+1}) lambda_{k+1}
    const double bs = (1.0 - 0.5 * dt * an.a11) * adj.lambda_s[k + 1] -
                      0.5 * dt * an.a12 * adj.lambda_i[k + 1];
    const double bi = -0.5 * dt * an.a21 * adj.lambda_s[k + 1] +
                      (1.0 - 0.5 * dt * an.a22) * adj.lambda_i[k + 1];
    const double m11 = 1.0 + 0.5 * dt * ak.a11;
    const double m12 = 0.5 * dt * ak.a12;
    const double m21 = 0.5 * dt * ak.a21;
    const double m22 = 1.0 + 0.5 * dt * ak.a22;
    const double det = m11 * m22 - m12 * m21;
    if (det == 0.0 || !std::isfinite(det)) {
      throw IntegrationError("adjoint_backward: singular step matrix (halve dt)");
    }
    adj.lambda_s[k] = (m22 * bs - m12 * bi) / det;
    adj.lambda_i[k] = (m11 * bi - m21 * bs) / det;
  }

  for (std::size_t k = 0; k < n; ++k) {
    adj.psi[k] = switching_function(p, pol, traj.states[k], adj.lambda_s[k], adj.lambda_i[k]);
    adj.hamiltonian[k] =
        hamiltonian(p, pol, traj.states[k], adj.lambda_s[k], adj.lambda_i[k], traj.controls[k]);
  }
  return adj;
}

PmpReport check_pmp(const ModelParams& p, const Policy& pol, const OptimalResult& result,
                    const IntegratorConfig& cfg) {
  (void)cfg;  // grid data lives on the trajectory itself
  const Trajectory& traj = result.trajectory;
  const AdjointTrajectory adj = adjoint_backward(p, pol, traj, cfg);
  const std::size_t n = traj.times.size();
  const double dt = traj.dt;

  PmpReport rep;

  // The conditions hold exactly only in the continuum; tolerances scale with
  // dt and with the problem's natural magnitudes (the terminal costate
  // 1/|dI/dt(T)| for H, the steepest observed psi slope for psi).
  const double lam_T = std::abs(adj.lambda_i[n - 1]);
  double psi_slope = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    psi_slope = std::max(psi_slope, std::abs(adj.psi[k + 1] - adj.psi[k]) / dt);
  }
  rep.ham_tol = 10.0 * dt * std::max(1.0, lam_T);
  rep.psi_tol = 10.0 * dt * std::max({1.0, lam_T, psi_slope});

  for (double h : adj.hamiltonian) {
    rep.max_abs_hamiltonian = std::max(rep.max_abs_hamiltonian, std::abs(h));
  }
  rep.hamiltonian_ok = rep.max_abs_hamiltonian <= rep.ham_tol;

  for (std::size_t k = 0; k < n; ++k) {
    const bool control_on = traj.controls[k] > 0.0;
    if (adj.psi[k] > rep.psi_tol && control_on) ++rep.sign_violations;
    if (adj.psi[k] < -rep.psi_tol && !control_on && pol.u_max > 0.0) ++rep.sign_violations;
  }
  rep.sign_consistency_ok = rep.sign_violations == 0;

  // Sign changes of psi, read from runs of definite sign. Runs shorter than
  // two grid points are discretization chatter and do not count.
  {
    int prev_sign = 0;
    int run_len = 0;
    int prev_kept_sign = 0;
    for (std::size_t k = 0; k < n; ++k) {
      int s = 0;
      if (adj.psi[k] > rep.psi_tol) s = 1;
      else if (adj.psi[k] < -rep.psi_tol) s = -1;
      if (s != 0 && s == prev_sign) ++run_len;
      else run_len = (s != 0) ? 1 : 0;
      prev_sign = s;
      if (s != 0 && run_len == 2) {  // run became credible
        if (prev_kept_sign != 0 && s != prev_kept_sign) {
          ++rep.crossing_count;
          if (rep.crossing_count == 1) {
            rep.crossing_time = traj.times[k - 1];  // first point of the new run
            rep.crossing_ok = (prev_kept_sign == 1 && s == -1);
          }
        }
        prev_kept_sign = s;
      }
    }
    if (rep.crossing_count == 0) rep.crossing_ok = true;
    if (rep.crossing_count > 1) rep.crossing_ok = false;
  }

  rep.transversality_residual = std::abs(adj.lambda_s[n - 1]);
  rep.transversality_ok = rep.transversality_residual == 0.0;

  {
    const long k_tau = std::llround(result.tau_star / dt);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<long>(k) > k_tau) worst = std::max(worst, adj.psi[k]);
    }
    rep.max_psi_controlled = worst;
    rep.controlled_segment_ok = worst <= rep.psi_tol;
  }

  return rep;
}

void write_report_csv(const PmpReport& rep, std::ostream& out) {
  out << "max_abs_H,ham_tol,hamiltonian_ok,sign_violations,sign_consistency_ok,"
         "crossing_count,crossing_time,crossing_ok,transversality_residual,transversality_ok,"
         "max_psi_controlled,psi_tol,controlled_segment_ok,all_ok\n";
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%d,%d,%d,%.17g,%d,%.17g,%d,%.17g,%.17g,%d,%d\n",
                rep.max_abs_hamiltonian, rep.ham_tol, rep.hamiltonian_ok ? 1 : 0,
                rep.sign_violations, rep.sign_consistency_ok ? 1 : 0, rep.crossing_count,
                rep.crossing_time, rep.crossing_ok ? 1 : 0, rep.transversality_residual,
                rep.transversality_ok ? 1 : 0, rep.max_psi_controlled, rep.psi_tol,
                rep.controlled_segment_ok ? 1 : 0, rep.all_ok() ? 1 : 0);
  out << buf;
}

void write_adjoint_csv(const AdjointTrajectory& adj, std::ostream& out) {
  out << "t,lambda_S,lambda_I,psi,H\n";
  char buf[256];
  for (std::size_t k = 0; k < adj.times.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", adj.times[k],
                  adj.lambda_s[k], adj.lambda_i[k], adj.psi[k], adj.hamiltonian[k]);
    out << buf;
  }
}

}  // namespace sirtoc
