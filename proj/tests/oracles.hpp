// Test-only reference implementations, kept independent of the integrator
// under test: a classical fixed-step 4th-order reference integrator and a
// bisection solver for the uncontrolled final-size relation.
#pragma once

#include <cmath>
#include <stdexcept>

#include "sirtoc/sir_core.hpp"

namespace oracles {

// Classical RK4 with n_sub substeps over [0, span], constant control.
inline sirtoc::State rk4_reference(const sirtoc::ModelParams& p, const sirtoc::Policy& pol,
                                   sirtoc::State x, double u, double span, int n_sub) {
  const double h = span / n_sub;
  for (int k = 0; k < n_sub; ++k) {
    const auto f = [&](const sirtoc::State& y) {
      return sirtoc::detail::field_raw(p, pol, y.s, y.i, u);
    };
    const sirtoc::Deriv k1 = f(x);
    const sirtoc::Deriv k2 = f({x.s + 0.5 * h * k1.ds, x.i + 0.5 * h * k1.di});
    const sirtoc::Deriv k3 = f({x.s + 0.5 * h * k2.ds, x.i + 0.5 * h * k2.di});
    const sirtoc::Deriv k4 = f({x.s + h * k3.ds, x.i + h * k3.di});
    x.s += h / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
    x.i += h / 6.0 * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di);
  }
  return x;
}

// Root S of ln(S0/S) = (beta/mu)(S0 + I0 - S) on (0, min(mu/beta, S0)),
// i.e. the susceptibles left when the uncontrolled outbreak has burnt out.
inline double final_size_root(const sirtoc::ModelParams& p) {
  const double c = p.beta / p.mu;
  const auto f = [&](double s) { return std::log(p.s0 / s) - c * (p.s0 + p.i0 - s); };
  double lo = 1e-9;
  double hi = std::min(1.0 / c, p.s0);
  if (!(f(lo) > 0.0) || !(f(hi) < 0.0)) {
    throw std::runtime_error("final_size_root: bracket does not straddle the root");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracles
