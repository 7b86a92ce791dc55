#include "sirtoc/integrate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace sirtoc {

namespace {

struct Jacobian {
  double a11, a12, a21, a22;
};

Jacobian field_jacobian(const ModelParams& p, const Policy& pol, double s, double i, double u) {
  if (pol.kind == PolicyKind::TransmissionReduction) {
    const double be = p.beta * (1.0 - u);
    return {-be * i, -be * s, be * i, be * s - p.mu};
  }
  return {-p.beta * i - pol.alpha1 * u, -p.beta * s,
          p.beta * i, p.beta * s - p.mu - pol.alpha2 * u};
}

enum class StepOutcome { Ok, NoConvergence, NegativeState };

// One implicit trapezoidal step in place. tol_abs is the residual tolerance
// on the state scale; it doubles as the negative-clamp threshold.
StepOutcome cn_step(const ModelParams& p, const Policy& pol, double u, double dt,
                    double tol_abs, int max_iter, State& x) {
  const Deriv f0 = detail::field_raw(p, pol, x.s, x.i, u);
  const double cs = x.s + 0.5 * dt * f0.ds;
  const double ci = x.i + 0.5 * dt * f0.di;

  double ys = x.s + dt * f0.ds;  // explicit predictor
  double yi = x.i + dt * f0.di;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const Deriv fy = detail::field_raw(p, pol, ys, yi, u);
    const double rs = ys - cs - 0.5 * dt * fy.ds;
    const double ri = yi - ci - 0.5 * dt * fy.di;
    if (std::abs(rs) <= tol_abs && std::abs(ri) <= tol_abs) {
      converged = true;
      break;
    }
    const Jacobian j = field_jacobian(p, pol, ys, yi, u);
    const double a11 = 1.0 - 0.5 * dt * j.a11;
    const double a12 = -0.5 * dt * j.a12;
    const double a21 = -0.5 * dt * j.a21;
    const double a22 = 1.0 - 0.5 * dt * j.a22;
    const double det = a11 * a22 - a12 * a21;
    if (det == 0.0 || !std::isfinite(det)) break;
    ys -= (a22 * rs - a12 * ri) / det;
    yi -= (a11 * ri - a21 * rs) / det;
    if (!std::isfinite(ys) || !std::isfinite(yi)) break;
  }

  if (!converged) {
    // Damped fixed point: y <- y + w*(Phi(y) - y), Phi(y) = c + (dt/2) F(y).
    const double w = 0.5;
    ys = x.s + dt * f0.ds;
    yi = x.i + dt * f0.di;
    for (int it = 0; it < 4 * max_iter; ++it) {
      const Deriv fy = detail::field_raw(p, pol, ys, yi, u);
      const double rs = cs + 0.5 * dt * fy.ds - ys;
      const double ri = ci + 0.5 * dt * fy.di - yi;
      if (std::abs(rs) <= tol_abs && std::abs(ri) <= tol_abs) {
        converged = true;
        break;
      }
      ys += w * rs;
      yi += w * ri;
      if (!std::isfinite(ys) || !std::isfinite(yi)) return StepOutcome::NoConvergence;
    }
    if (!converged) return StepOutcome::NoConvergence;
  }

  if (ys < 0.0 || yi < 0.0) {
    if (ys < -tol_abs || yi < -tol_abs) return StepOutcome::NegativeState;
    ys = std::max(ys, 0.0);
    yi = std::max(yi, 0.0);
  }
  x = {ys, yi};
  return StepOutcome::Ok;
}

double state_scale(const ModelParams& p) {
  return std::max(1.0, p.s0 + p.i0);
}

[[noreturn]] void throw_step_failure(StepOutcome outcome, double t) {
  std::ostringstream msg;
  msg << "integration step failed at t=" << t
      << (outcome == StepOutcome::NoConvergence
              ? ": implicit solver did not converge (halve dt)"
              : ": state went negative beyond tolerance");
  throw IntegrationError(msg.str());
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0 and finite");
  if (!(t_horizon > 0.0)) throw std::invalid_argument("t_horizon must be > 0");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be > 0");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
}

State step(const ModelParams& p, const Policy& pol, const State& x, double u,
           const IntegratorConfig& cfg) {
  p.validate();
  pol.validate();
  cfg.validate();
  if (!(x.s >= 0.0) || !(x.i >= 0.0)) {
    throw std::domain_error("step: state components must be nonnegative");
  }
  if (!(u >= 0.0) || !(u <= pol.u_max)) {
    throw std::domain_error("step: control must lie in [0, u_max]");
  }
  State y = x;
  const StepOutcome outcome =
      cn_step(p, pol, u, cfg.dt, cfg.newton_tol * state_scale(p), cfg.newton_max_iter, y);
  if (outcome != StepOutcome::Ok) throw_step_failure(outcome, 0.0);
  return y;
}

Trajectory simulate(const ModelParams& p, const Policy& pol, const ControlSchedule& sched,
                    const IntegratorConfig& cfg) {
  p.validate();
  pol.validate();
  cfg.validate();
  if (!(sched.tau >= 0.0) || !std::isfinite(sched.tau)) {
    throw std::invalid_argument("tau must be >= 0 and finite");
  }
  if (!(sched.u_max >= 0.0) || !(sched.u_max <= pol.u_max)) {
    throw std::invalid_argument("schedule u_max must lie in [0, policy u_max]");
  }

  const double dt = cfg.dt;
  const long n_max = static_cast<long>(std::ceil(cfg.t_horizon / dt - 1e-12));
  const long k_tau = static_cast<long>(std::llround(sched.tau / dt));  // snap to grid
  const double tol_abs = cfg.newton_tol * state_scale(p);

  Trajectory traj;
  traj.dt = dt;
  const std::size_t guess = static_cast<std::size_t>(std::min<long>(n_max + 1, 1 << 16));
  traj.times.reserve(guess);
  traj.states.reserve(guess);
  traj.controls.reserve(guess);

  State x{p.s0, p.i0};
  long k = 0;
  while (true) {
    const double u_here = (k >= k_tau) ? sched.u_max : 0.0;
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.states.push_back(x);
    traj.controls.push_back(u_here);

    if (x.i <= p.epsilon) {
      traj.status = SimStatus::Eradicated;
      traj.eradication_time = traj.times.back();
      if (cfg.interpolate_eradication && k > 0) {
        const double i_prev = traj.states[traj.states.size() - 2].i;
        const double denom = i_prev - x.i;
        if (denom > 0.0) {
          traj.eradication_time_interp =
              traj.times[traj.times.size() - 2] + dt * (i_prev - p.epsilon) / denom;
        }
      }
      break;
    }
    if (k >= n_max) {
      traj.status = SimStatus::HorizonExhausted;
      break;
    }

    const StepOutcome outcome = cn_step(p, pol, u_here, dt, tol_abs, cfg.newton_max_iter, x);
    if (outcome != StepOutcome::Ok) throw_step_failure(outcome, static_cast<double>(k) * dt);
    ++k;
  }
  return traj;
}

double uncontrolled_eradication_time(const ModelParams& p, const IntegratorConfig& cfg) {
  const Trajectory traj = simulate(p, Policy::make(PolicyKind::Vaccination, 0.0), {0.0, 0.0}, cfg);
  if (!traj.eradication_time) {
    throw IntegrationError("uncontrolled run exhausted the horizon before reaching the threshold");
  }
  return *traj.eradication_time;
}

double peak_time(const Trajectory& traj) {
  if (traj.times.empty()) throw std::invalid_argument("peak_time: empty trajectory");
  std::size_t best = 0;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    if (traj.states[k].i > traj.states[best].i) best = k;
  }
  return traj.times[best];
}

IntegratorConfig default_config(const ModelParams& p, const Policy& pol) {
  p.validate();
  pol.validate();
  const double dt_rate = std::min(0.2 / p.mu, 0.2 / (p.mu + pol.u_max));

  IntegratorConfig boot{dt_rate, 400.0 / p.mu};
  double t_unc = -1.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Trajectory probe =
        simulate(p, Policy::make(PolicyKind::Vaccination, 0.0), {0.0, 0.0}, boot);
    if (probe.eradication_time) {
      t_unc = *probe.eradication_time;
      break;
    }
    boot.t_horizon *= 4.0;
  }
  if (t_unc <= 0.0) {
    throw IntegrationError("default_config: uncontrolled epidemic did not die out within the bootstrap horizon");
  }

  IntegratorConfig cfg;
  cfg.dt = std::min(dt_rate, t_unc / 5000.0);
  cfg.t_horizon = 50.0 * t_unc;
  return cfg;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,S,I,u\n";
  char buf[128];
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", traj.times[k],
                  traj.states[k].s, traj.states[k].i, traj.controls[k]);
    out << buf;
  }
}

namespace detail {

std::optional<long> steps_to_eradication(const ModelParams& p, const Policy& pol, State x,
                                         double u, long max_steps, const IntegratorConfig& cfg) {
  if (x.i <= p.epsilon) return 0;
  const double tol_abs = cfg.newton_tol * state_scale(p);
  for (long n = 1; n <= max_steps; ++n) {
    const StepOutcome outcome = cn_step(p, pol, u, cfg.dt, tol_abs, cfg.newton_max_iter, x);
    if (outcome != StepOutcome::Ok) throw_step_failure(outcome, static_cast<double>(n) * cfg.dt);
    if (x.i <= p.epsilon) return n;
  }
  return std::nullopt;
}

}  // namespace detail

}  // namespace sirtoc
