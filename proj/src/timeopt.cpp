#include "sirtoc/timeopt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

namespace sirtoc {

namespace {

// Shared machinery for the tau scan: the prefix of every delayed run is the
// uncontrolled trajectory, so each mesh point only integrates the controlled
// tail from the cached state at tau.
struct TauScan {
  const ModelParams& p;
  const Policy& pol;
  const IntegratorConfig& cfg;
  const Trajectory& unc;  // do-nothing run, ends at the first grid point with I <= eps
  long n_unc;             // grid index of t_unc
  long n_max;             // horizon cap in steps
  std::map<long, double> memo;  // grid index of tau -> T(tau)

  double eval(long k) {
    auto hit = memo.find(k);
    if (hit != memo.end()) return hit->second;
    double T;
    if (k >= n_unc) {
      T = unc.times.back();
    } else {
      const auto steps = detail::steps_to_eradication(p, pol, unc.states[static_cast<std::size_t>(k)],
                                                      pol.u_max, n_max - k, cfg);
      if (!steps) {
        std::ostringstream msg;
        msg << "optimize: horizon exhausted at tau=" << static_cast<double>(k) * cfg.dt;
        throw IntegrationError(msg.str());
      }
      T = static_cast<double>(k + *steps) * cfg.dt;
    }
    memo.emplace(k, T);
    return T;
  }
};

}  // namespace

const char* to_string(RegimeClass regime) {
  switch (regime) {
    case RegimeClass::ConstantMax: return "constant_max";
    case RegimeClass::DelayedBeforePeak: return "delayed_before_peak";
    case RegimeClass::DelayedAtPeak: return "delayed_at_peak";
    case RegimeClass::DelayedAfterPeak: return "delayed_after_peak";
  }
  return "unknown";
}

double default_peak_tol(const IntegratorConfig& cfg) {
  return 3.0 * cfg.dt;
}

double eradication_time_for_tau(const ModelParams& p, const Policy& pol, double tau,
                                const IntegratorConfig& cfg) {
  const Trajectory traj = simulate(p, pol, {tau, pol.u_max}, cfg);
  if (!traj.eradication_time) {
    std::ostringstream msg;
    msg << "eradication_time_for_tau: horizon exhausted at tau=" << tau;
    throw IntegrationError(msg.str());
  }
  return *traj.eradication_time;
}

RegimeClass classify(double tau_star, const Trajectory& traj_at_star, double peak_tol,
                     const IntegratorConfig& cfg) {
  if (!(peak_tol > 0.0)) throw std::invalid_argument("peak_tol must be > 0");
  if (tau_star < cfg.dt) return RegimeClass::ConstantMax;
  const double t_p = peak_time(traj_at_star);
  if (tau_star < t_p - peak_tol) return RegimeClass::DelayedBeforePeak;
  if (tau_star > t_p + peak_tol) return RegimeClass::DelayedAfterPeak;
  return RegimeClass::DelayedAtPeak;
}

OptimalResult optimize(const ModelParams& p, const Policy& pol, int mesh_count,
                       const IntegratorConfig& cfg) {
  p.validate();
  pol.validate();
  cfg.validate();
  if (mesh_count < 2) throw std::invalid_argument("mesh_count must be >= 2");

  const Trajectory unc = simulate(p, pol, {0.0, 0.0}, cfg);
  if (!unc.eradication_time) {
    throw IntegrationError("optimize: uncontrolled run exhausted the horizon");
  }
  const double t_unc = *unc.eradication_time;
  const long n_unc = static_cast<long>(std::llround(t_unc / cfg.dt));
  const long n_max = static_cast<long>(std::ceil(cfg.t_horizon / cfg.dt - 1e-12));

  TauScan scan{p, pol, cfg, unc, n_unc, n_max, {}};

  // Coarse mesh over [0, t_unc], spacing an integer multiple of dt.
  const long stride =
      std::max<long>(1, std::llround(static_cast<double>(n_unc) / (mesh_count - 1)));
  std::vector<long> coarse;
  for (long k = 0; k < n_unc; k += stride) coarse.push_back(k);
  coarse.push_back(n_unc);

  std::vector<double> coarse_T(coarse.size());
  std::size_t j = 0;
  for (std::size_t idx = 0; idx < coarse.size(); ++idx) {
    coarse_T[idx] = scan.eval(coarse[idx]);
    if (coarse_T[idx] < coarse_T[j]) j = idx;
  }

  // Plateau diagnostic: a run of >=3 adjacent mesh points all within 2*dt of
  // the minimum means the objective is essentially flat there.
  bool plateau = false;
  {
    const double lim = coarse_T[j] + 2.0 * cfg.dt;
    int run = 0;
    for (double T : coarse_T) {
      run = (T <= lim) ? run + 1 : 0;
      if (run >= 3) {
        plateau = true;
        break;
      }
    }
  }

  // One refinement pass between the mesh neighbours of the coarse minimizer.
  const long lo = coarse[j > 0 ? j - 1 : 0];
  const long hi = coarse[std::min(j + 1, coarse.size() - 1)];
  long k_star = coarse[j];
  double T_star = coarse_T[j];
  if (hi > lo) {
    const long fine_stride =
        std::max<long>(1, std::llround(static_cast<double>(hi - lo) / (mesh_count - 1)));
    for (long k = lo; k <= hi; k += fine_stride) {
      const double T = scan.eval(k);
      if (T < T_star || (T == T_star && k < k_star)) {
        k_star = k;
        T_star = T;
      }
    }
    const double T_hi = scan.eval(hi);
    if (T_hi < T_star) {
      k_star = hi;
      T_star = T_hi;
    }
  }

  OptimalResult res;
  res.tau_star = static_cast<double>(k_star) * cfg.dt;
  res.T_star = T_star;
  res.t_unc = t_unc;
  res.T_at_zero = scan.eval(0);
  res.plateau = plateau;
  res.scanned.reserve(scan.memo.size());
  for (const auto& [k, T] : scan.memo) {
    res.scanned.emplace_back(static_cast<double>(k) * cfg.dt, T);
  }

  res.trajectory = simulate(p, pol, {res.tau_star, pol.u_max}, cfg);
  res.s_at_Tstar = res.trajectory.states.back().s;
  if (k_star == 0) {
    res.s_at_Tzero = res.s_at_Tstar;
  } else {
    const Trajectory at_zero = simulate(p, pol, {0.0, pol.u_max}, cfg);
    res.s_at_Tzero = at_zero.states.back().s;
  }
  res.regime = classify(res.tau_star, res.trajectory, default_peak_tol(cfg), cfg);
  return res;
}

void write_result_csv_header(std::ostream& out) {
  out << "policy,beta,mu,s0,i0,eps,u_max,R0,RC,tau_star,T_star,T_at_zero,s_at_Tstar,s_at_Tzero,regime\n";
}

void write_result_csv_row(const ModelParams& p, const Policy& pol, const OptimalResult& res,
                          std::ostream& out) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                to_string(pol.kind), p.beta, p.mu, p.s0, p.i0, p.epsilon, pol.u_max, r0(p),
                rc(p, pol), res.tau_star, res.T_star, res.T_at_zero, res.s_at_Tstar,
                res.s_at_Tzero, to_string(res.regime));
  out << buf;
}

}  // namespace sirtoc
