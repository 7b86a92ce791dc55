#include "sirtoc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <thread>

namespace sirtoc {

namespace {

double linspace_value(double lo, double hi, int n, int i) {
  if (n == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// Runs job(i) for i in [0, count) on the worker pool; each job writes only
// its own slot, so the result is schedule-independent.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job) {
  const int workers = std::min<int>(worker_count(), static_cast<int>(count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      job(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
}

double u_where_rc_is_one(PolicyKind kind, const ModelParams& p) {
  switch (kind) {
    case PolicyKind::Isolation:
    case PolicyKind::Culling:
      return p.beta * p.s0 - p.mu;
    case PolicyKind::TransmissionReduction:
      return 1.0 - p.mu / (p.beta * p.s0);
    case PolicyKind::Vaccination:
      return std::numeric_limits<double>::quiet_NaN();  // rc does not depend on u_max
  }
  return std::numeric_limits<double>::quiet_NaN();
}

const char* regime_label(const MapCell& cell) {
  return cell.failed ? "failed" : to_string(cell.regime);
}

const char* regime_label(const CurvePoint& pt) {
  return pt.failed ? "failed" : to_string(pt.regime);
}

}  // namespace

const char* to_string(SweepAxis axis) {
  return axis == SweepAxis::UMax ? "umax" : "i0";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "umax" || name == "u_max") return SweepAxis::UMax;
  if (name == "i0") return SweepAxis::InitialInfected;
  throw std::invalid_argument("x_axis must be umax or i0, got '" + name + "'");
}

IntegratorConfig IntegratorOverrides::resolve(const ModelParams& p, const Policy& pol) const {
  IntegratorConfig cfg = default_config(p, pol);
  if (dt) cfg.dt = *dt;
  if (t_horizon) cfg.t_horizon = *t_horizon;
  if (newton_tol) cfg.newton_tol = *newton_tol;
  if (newton_max_iter) cfg.newton_max_iter = *newton_max_iter;
  cfg.validate();
  return cfg;
}

void SweepSpec::validate() const {
  if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be > 0");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (x_axis == SweepAxis::UMax && !(i0 > eps)) throw std::invalid_argument("i0 must be > eps");
  if (n_x < 2 || n_y < 2) throw std::invalid_argument("n_x and n_y must be >= 2");
  if (!(x_lo <= x_hi)) throw std::invalid_argument("x_lo must be <= x_hi");
  if (!(r0_lo <= r0_hi)) throw std::invalid_argument("r0_lo must be <= r0_hi");
  if (!(x_lo >= 0.0)) throw std::invalid_argument("x_lo must be >= 0");
  if (!(r0_lo > 0.0)) throw std::invalid_argument("r0_lo must be > 0");
  if (mesh_count < 2) throw std::invalid_argument("mesh_count must be >= 2");
  if (x_axis == SweepAxis::InitialInfected && !(x_lo > eps)) {
    throw std::invalid_argument("i0 range must stay above eps");
  }
}

double SweepSpec::x_value(int i) const { return linspace_value(x_lo, x_hi, n_x, i); }
double SweepSpec::y_value(int j) const { return linspace_value(r0_lo, r0_hi, n_y, j); }

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("SIRTOC_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

RegimeMap run_map(const SweepSpec& spec) {
  spec.validate();
  RegimeMap map;
  map.spec = spec;
  map.cells.assign(static_cast<std::size_t>(spec.n_x) * spec.n_y, MapCell{});

  parallel_for(map.cells.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) % spec.n_x;
    const int j = static_cast<int>(idx) / spec.n_x;
    MapCell& cell = map.cells[idx];
    cell.x = spec.x_value(i);
    cell.y = spec.y_value(j);
    try {
      ModelParams p{cell.y * spec.mu / spec.s0, spec.mu, spec.s0,
                    spec.x_axis == SweepAxis::InitialInfected ? cell.x : spec.i0, spec.eps};
      const double u = spec.x_axis == SweepAxis::UMax ? cell.x : spec.u_max_fixed;
      const Policy pol = Policy::make(spec.kind, u);
      const IntegratorConfig cfg = spec.integrator.resolve(p, pol);
      const OptimalResult res = optimize(p, pol, spec.mesh_count, cfg);
      cell.regime = res.regime;
      cell.tau_star = res.tau_star;
      cell.T_star = res.T_star;
      cell.T_at_zero = res.T_at_zero;
      cell.s_at_Tstar = res.s_at_Tstar;
      cell.s_at_Tzero = res.s_at_Tzero;
      cell.rc = rc(p, pol);
      cell.dt = cfg.dt;
      cell.plateau = res.plateau;
    } catch (const std::exception&) {
      cell.failed = true;
    }
  });
  return map;
}

CurveTable run_curves(PolicyKind kind, const ModelParams& p, double u_lo, double u_hi,
                      int n_points, int mesh_count, const IntegratorOverrides& overrides) {
  if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
  if (!(u_lo >= 0.0) || !(u_lo <= u_hi)) throw std::invalid_argument("u range must satisfy 0 <= u_lo <= u_hi");

  std::vector<double> us;
  us.reserve(static_cast<std::size_t>(n_points) + 1);
  for (int i = 0; i < n_points; ++i) us.push_back(linspace_value(u_lo, u_hi, n_points, i));

  CurveTable table;
  const double u1 = u_where_rc_is_one(kind, p);
  if (std::isfinite(u1) && u1 > u_lo && u1 < u_hi) {
    table.u_rc_one = u1;
    const auto pos = std::lower_bound(us.begin(), us.end(), u1);
    if (pos == us.end() || std::abs(*pos - u1) > 1e-12) us.insert(pos, u1);
  }

  table.points.assign(us.size(), CurvePoint{});
  parallel_for(us.size(), [&](std::size_t idx) {
    CurvePoint& pt = table.points[idx];
    pt.u_max = us[idx];
    try {
      const Policy pol = Policy::make(kind, pt.u_max);
      const IntegratorConfig cfg = overrides.resolve(p, pol);
      const OptimalResult res = optimize(p, pol, mesh_count, cfg);
      pt.regime = res.regime;
      pt.rc = rc(p, pol);
      pt.tau_star = res.tau_star;
      pt.T_star = res.T_star;
      pt.T_at_zero = res.T_at_zero;
      pt.s_at_Tstar = res.s_at_Tstar;
      pt.s_at_Tzero = res.s_at_Tzero;
      pt.t_unc = res.t_unc;
      pt.dt = cfg.dt;
      pt.plateau = res.plateau;
    } catch (const std::exception&) {
      pt.failed = true;
    }
  });
  return table;
}

std::optional<TransitionRecord> detect_transition(const CurveTable& table) {
  std::vector<const CurvePoint*> pts;
  for (const auto& pt : table.points) {
    if (!pt.failed) pts.push_back(&pt);
  }
  if (pts.size() < 2) return std::nullopt;

  std::vector<double> abs_deltas;
  abs_deltas.reserve(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    abs_deltas.push_back(std::abs(pts[i + 1]->tau_star - pts[i]->tau_star));
  }
  std::vector<double> sorted = abs_deltas;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double drop = pts[i]->tau_star - pts[i + 1]->tau_star;
    const double floor = std::max(pts[i]->dt, pts[i + 1]->dt);  // one grid cell
    if (drop > 10.0 * std::max(median, floor)) {
      TransitionRecord rec;
      rec.index = static_cast<int>(i);
      rec.u_before = pts[i]->u_max;
      rec.u_after = pts[i + 1]->u_max;
      rec.tau_drop = drop;
      rec.dT_star = pts[i + 1]->T_star - pts[i]->T_star;
      rec.dS_at_Tstar = pts[i + 1]->s_at_Tstar - pts[i]->s_at_Tstar;
      return rec;
    }
  }
  return std::nullopt;
}

void write_map_csv(const RegimeMap& map, std::ostream& out) {
  out << "x_value,y_value,regime,tau_star,T_star,T_at_zero,s_at_Tstar,s_at_Tzero,RC\n";
  char buf[512];
  for (const MapCell& cell : map.cells) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  cell.x, cell.y, regime_label(cell), cell.tau_star, cell.T_star, cell.T_at_zero,
                  cell.s_at_Tstar, cell.s_at_Tzero, cell.rc);
    out << buf;
  }
}

void write_curve_csv(const CurveTable& table, std::ostream& out) {
  out << "u_max,regime,tau_star,T_star,T_at_zero,s_at_Tstar,s_at_Tzero,RC\n";
  char buf[512];
  for (const CurvePoint& pt : table.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", pt.u_max,
                  regime_label(pt), pt.tau_star, pt.T_star, pt.T_at_zero, pt.s_at_Tstar,
                  pt.s_at_Tzero, pt.rc);
    out << buf;
  }
}

void write_map_svg(const RegimeMap& map, std::ostream& out) {
  const int cell_px = 12;
  const int margin = 40;
  const int w = map.spec.n_x * cell_px + 2 * margin;
  const int h = map.spec.n_y * cell_px + 2 * margin;

  auto fill_of = [](const MapCell& cell) -> const char* {
    if (cell.failed) return "#cc3333";
    switch (cell.regime) {
      case RegimeClass::ConstantMax: return "#ffffff";
      case RegimeClass::DelayedBeforePeak: return "#d3d3d3";
      case RegimeClass::DelayedAtPeak: return "#808080";
      case RegimeClass::DelayedAfterPeak: return "#404040";
    }
    return "#cc3333";
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
  for (int j = 0; j < map.spec.n_y; ++j) {
    for (int i = 0; i < map.spec.n_x; ++i) {
      const MapCell& cell = map.at(i, j);
      const int px = margin + i * cell_px;
      const int py = margin + (map.spec.n_y - 1 - j) * cell_px;  // y grows upward
      out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell_px << "\" height=\""
          << cell_px << "\" fill=\"" << fill_of(cell) << "\"/>\n";
    }
  }
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\""
      << map.spec.n_x * cell_px << "\" height=\"" << map.spec.n_y * cell_px
      << "\" fill=\"none\" stroke=\"#000000\"/>\n";
  char label[128];
  std::snprintf(label, sizeof(label),
                "<text x=\"%d\" y=\"%d\" font-size=\"10\">%s: %.3g..%.3g</text>\n", margin,
                h - margin / 2, to_string(map.spec.x_axis), map.spec.x_lo, map.spec.x_hi);
  out << label;
  std::snprintf(label, sizeof(label),
                "<text x=\"%d\" y=\"%d\" font-size=\"10\" transform=\"rotate(-90 12 %d)\">R0: "
                "%.3g..%.3g</text>\n",
                12, h / 2, h / 2, map.spec.r0_lo, map.spec.r0_hi);
  out << label;
  out << "</svg>\n";
}

}  // namespace sirtoc
