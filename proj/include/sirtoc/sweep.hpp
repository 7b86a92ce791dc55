#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "sirtoc/timeopt.hpp"

namespace sirtoc {

enum class SweepAxis { UMax, InitialInfected };

const char* to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// Partial overrides applied on top of the per-cell default integrator.
struct IntegratorOverrides {
  std::optional<double> dt;
  std::optional<double> t_horizon;
  std::optional<double> newton_tol;
  std::optional<int> newton_max_iter;

  IntegratorConfig resolve(const ModelParams& p, const Policy& pol) const;
};

/// Grid experiment: x is either u_max or I(0), y is R0 (mapped to
/// beta = R0*mu/s0 with s0 held at the spec value). Both axes are inclusive
/// linspaces; express half-open paper ranges by shifting the endpoint.
struct SweepSpec {
  PolicyKind kind = PolicyKind::Vaccination;
  double s0 = 2000.0;
  double i0 = 1.0;
  double mu = 5.0;
  double eps = 0.5;
  SweepAxis x_axis = SweepAxis::UMax;
  double x_lo = 0.5;
  double x_hi = 5.0;
  int n_x = 60;
  double r0_lo = 1.1;
  double r0_hi = 5.0;
  int n_y = 60;
  double u_max_fixed = 1.0;  // used when x_axis == InitialInfected
  int mesh_count = kDefaultMeshCount;
  IntegratorOverrides integrator;

  void validate() const;
  double x_value(int i) const;
  double y_value(int j) const;
};

struct MapCell {
  double x = 0.0;
  double y = 0.0;
  bool failed = false;
  RegimeClass regime = RegimeClass::ConstantMax;
  double tau_star = std::numeric_limits<double>::quiet_NaN();
  double T_star = std::numeric_limits<double>::quiet_NaN();
  double T_at_zero = std::numeric_limits<double>::quiet_NaN();
  double s_at_Tstar = std::numeric_limits<double>::quiet_NaN();
  double s_at_Tzero = std::numeric_limits<double>::quiet_NaN();
  double rc = std::numeric_limits<double>::quiet_NaN();
  double dt = std::numeric_limits<double>::quiet_NaN();
  bool plateau = false;
};

struct RegimeMap {
  SweepSpec spec;
  std::vector<MapCell> cells;  // row-major, x fastest: cells[j*n_x + i]

  const MapCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j) * spec.n_x + i]; }
};

/// Optimizes and classifies every grid cell. Cell failures are recorded, not
/// thrown; the output is independent of worker scheduling.
RegimeMap run_map(const SweepSpec& spec);

struct CurvePoint {
  double u_max = 0.0;
  bool failed = false;
  RegimeClass regime = RegimeClass::ConstantMax;
  double rc = std::numeric_limits<double>::quiet_NaN();
  double tau_star = std::numeric_limits<double>::quiet_NaN();
  double T_star = std::numeric_limits<double>::quiet_NaN();
  double T_at_zero = std::numeric_limits<double>::quiet_NaN();
  double s_at_Tstar = std::numeric_limits<double>::quiet_NaN();
  double s_at_Tzero = std::numeric_limits<double>::quiet_NaN();
  double t_unc = std::numeric_limits<double>::quiet_NaN();
  double dt = std::numeric_limits<double>::quiet_NaN();
  bool plateau = false;
};

struct CurveTable {
  std::vector<CurvePoint> points;          // ascending u_max
  std::optional<double> u_rc_one;          // u_max with rc = 1, when inside the range
};

/// Sweeps u_max over an inclusive linspace, inserting the exact rc = 1 point
/// when it falls inside the range.
CurveTable run_curves(PolicyKind kind, const ModelParams& p, double u_lo, double u_hi,
                      int n_points, int mesh_count = kDefaultMeshCount,
                      const IntegratorOverrides& overrides = {});

struct TransitionRecord {
  int index = 0;          // jump between points[index] and points[index+1]
  double u_before = 0.0;
  double u_after = 0.0;
  double tau_drop = 0.0;      // tau*[i] - tau*[i+1], positive at a delayed->constant jump
  double dT_star = 0.0;       // T*[i+1] - T*[i]
  double dS_at_Tstar = 0.0;   // S(T*)[i+1] - S(T*)[i]
};

/// First adjacent pair where tau* drops by more than 10x the median adjacent
/// change (with a one-grid-cell floor on the median). Empty when the curve
/// has no such jump.
std::optional<TransitionRecord> detect_transition(const CurveTable& table);

void write_map_csv(const RegimeMap& map, std::ostream& out);
void write_curve_csv(const CurveTable& table, std::ostream& out);
void write_map_svg(const RegimeMap& map, std::ostream& out);

/// Worker threads for sweeps: hardware concurrency capped by the
/// SIRTOC_WORKERS environment variable.
int worker_count();

}  // namespace sirtoc
