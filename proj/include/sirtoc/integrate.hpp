#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "sirtoc/sir_core.hpp"

namespace sirtoc {

/// A one-jump schedule: u(t) = 0 on [0, tau), u_max from tau on.
/// tau = 0 means the control is at its maximum for the whole outbreak.
struct ControlSchedule {
  double tau;
  double u_max;
};

struct IntegratorConfig {
  double dt;                             // uniform step size
  double t_horizon;                      // hard time cap
  double newton_tol = 1e-10;             // implicit-step residual tolerance, relative to state scale
  int newton_max_iter = 25;
  bool interpolate_eradication = false;  // also record a linearly interpolated crossing time

  void validate() const;
};

enum class SimStatus { Eradicated, HorizonExhausted };

/// Discrete record of one run, on the uniform grid t_k = k*dt, up to the
/// first grid point with I <= epsilon (or the horizon).
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> controls;                       // u(t_k) per grid point
  std::optional<double> eradication_time;             // first grid time with I <= epsilon
  std::optional<double> eradication_time_interp;      // only with interpolate_eradication
  SimStatus status = SimStatus::HorizonExhausted;
  double dt = 0.0;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One Crank-Nicolson step with the control held constant:
/// solves y = x + (dt/2)(F(x) + F(y)), F = f + u g, by Newton iteration with
/// a damped fixed-point fallback. Components within newton_tol below zero are
/// clamped to zero; anything more negative is an integration failure.
State step(const ModelParams& p, const Policy& pol, const State& x, double u,
           const IntegratorConfig& cfg);

/// Integrates the schedule u(t; tau) until the first grid point with
/// I <= epsilon. tau is snapped to the nearest grid point. Exhausting the
/// horizon is not an error: the returned status says which case occurred.
Trajectory simulate(const ModelParams& p, const Policy& pol, const ControlSchedule& sched,
                    const IntegratorConfig& cfg);

/// Eradication time of the do-nothing run. Throws if the horizon is exhausted.
double uncontrolled_eradication_time(const ModelParams& p, const IntegratorConfig& cfg);

/// Grid time of the maximum of I; ties break toward the earliest point.
double peak_time(const Trajectory& traj);

/// dt = min(0.2/mu, 0.2/(mu+u_max), T_unc/5000), horizon = 50*T_unc, with
/// T_unc estimated from a coarse bootstrap run.
IntegratorConfig default_config(const ModelParams& p, const Policy& pol);

/// Columns t,S,I,u; full-precision decimal values.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

namespace detail {

// Steps with constant control from a mid-run state until I <= epsilon.
// Returns the number of steps taken, or nullopt once max_steps is exceeded.
// Bit-identical to the tail of simulate() starting from the same state.
std::optional<long> steps_to_eradication(const ModelParams& p, const Policy& pol, State x,
                                         double u, long max_steps, const IntegratorConfig& cfg);

}  // namespace detail

}  // namespace sirtoc
