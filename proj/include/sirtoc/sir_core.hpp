#pragma once

#include <stdexcept>
#include <string>

namespace sirtoc {

/// Which intervention the control rate u(t) drives.
enum class PolicyKind { Vaccination, Isolation, Culling, TransmissionReduction };

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// Epidemiological constants and initial state of the outbreak.
/// The outbreak is over once the infected count reaches `epsilon`.
struct ModelParams {
  double beta;            // transmission rate, 1/(individuals * time)
  double mu;              // removal rate, 1/time
  double s0;              // initial susceptibles
  double i0;              // initial infected, must exceed epsilon
  double epsilon = 0.5;   // eradication threshold, in (0,1)

  void validate() const;  // throws std::invalid_argument naming the bad field
};

/// A control policy: the intervention kind plus its maximum rate.
/// The three linear policies subtract (alpha1*u*S, alpha2*u*I) from the flow;
/// transmission reduction scales the infection term by (1-u).
struct Policy {
  PolicyKind kind;
  double u_max;    // 1/time for linear policies, fraction in [0,1] for reduction
  double alpha1;   // S-term coefficient (1 for vaccination/culling)
  double alpha2;   // I-term coefficient (1 for isolation/culling)

  static Policy make(PolicyKind kind, double u_max);
  void validate() const;
};

struct State {
  double s;
  double i;
};

struct Deriv {
  double ds;
  double di;
};

namespace detail {

// Field evaluation without precondition checks; implicit-solver iterates may
// probe slightly outside the admissible region.
inline Deriv field_raw(const ModelParams& p, const Policy& pol, double s, double i, double u) {
  const double infection = p.beta * s * i;
  if (pol.kind == PolicyKind::TransmissionReduction) {
    const double flow = (1.0 - u) * infection;
    return {-flow, flow - p.mu * i};
  }
  return {-infection - pol.alpha1 * u * s, infection - p.mu * i - pol.alpha2 * u * i};
}

}  // namespace detail

/// Controlled flow f(x) + u*g(x). With u = 0 this is the plain SIR field.
inline Deriv vector_field(const ModelParams& p, const Policy& pol, const State& x, double u) {
  if (!(x.s >= 0.0) || !(x.i >= 0.0)) {
    throw std::domain_error("vector_field: state components must be nonnegative");
  }
  if (!(u >= 0.0) || !(u <= pol.u_max)) {
    throw std::domain_error("vector_field: control must lie in [0, u_max]");
  }
  return detail::field_raw(p, pol, x.s, x.i, u);
}

/// Basic reproduction number beta*S(0)/mu.
double r0(const ModelParams& p);

/// Control reproduction number: secondary infections with the control held at
/// u_max from the start. Equals r0 when u_max = 0.
double rc(const ModelParams& p, const Policy& pol);

}  // namespace sirtoc
