#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "sirtoc/integrate.hpp"

namespace sirtoc {

/// Where the optimal start of intervention sits relative to the infection peak.
enum class RegimeClass { ConstantMax, DelayedBeforePeak, DelayedAtPeak, DelayedAfterPeak };

const char* to_string(RegimeClass regime);

struct OptimalResult {
  double tau_star = 0.0;      // optimal starting intervention time (grid-snapped)
  double T_star = 0.0;        // eradication time at tau_star
  double T_at_zero = 0.0;     // eradication time of the constant-max schedule
  double t_unc = 0.0;         // eradication time with no control
  RegimeClass regime = RegimeClass::ConstantMax;
  Trajectory trajectory;      // full run at tau_star
  double s_at_Tstar = 0.0;
  double s_at_Tzero = 0.0;
  bool plateau = false;       // >=3 adjacent mesh points within 2*dt of the minimum
  std::vector<std::pair<double, double>> scanned;  // (tau, T) for every evaluated mesh point
};

/// T(tau): eradication time of the schedule that waits until tau and then
/// applies u_max. Throws IntegrationError if the horizon is exhausted.
double eradication_time_for_tau(const ModelParams& p, const Policy& pol, double tau,
                                const IntegratorConfig& cfg);

/// Scans T(tau) on a uniform mesh of about mesh_count points over [0, T_unc]
/// (spacing an integer multiple of dt), refines once around the coarse
/// minimizer, and returns the best schedule found. Ties break toward the
/// smallest tau, so a flat objective reports the constant-max schedule.
OptimalResult optimize(const ModelParams& p, const Policy& pol, int mesh_count,
                       const IntegratorConfig& cfg);

/// tau_star < dt counts as constant control; otherwise the start time is
/// compared against the infection peak of the optimal run with a +-peak_tol
/// band (default 3*dt).
RegimeClass classify(double tau_star, const Trajectory& traj_at_star, double peak_tol,
                     const IntegratorConfig& cfg);

double default_peak_tol(const IntegratorConfig& cfg);

constexpr int kDefaultMeshCount = 400;

void write_result_csv_header(std::ostream& out);
void write_result_csv_row(const ModelParams& p, const Policy& pol, const OptimalResult& res,
                          std::ostream& out);

}  // namespace sirtoc
