#include "sirtoc/sir_core.hpp"

#include <cmath>
#include <sstream>

namespace sirtoc {

namespace {

[[noreturn]] void fail_field(const std::string& field, const std::string& why, double got) {
  std::ostringstream msg;
  msg << field << " " << why << " (got " << got << ")";
  throw std::invalid_argument(msg.str());
}

}  // namespace

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Vaccination: return "vaccination";
    case PolicyKind::Isolation: return "isolation";
    case PolicyKind::Culling: return "culling";
    case PolicyKind::TransmissionReduction: return "reduction";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "vaccination") return PolicyKind::Vaccination;
  if (name == "isolation") return PolicyKind::Isolation;
  if (name == "culling") return PolicyKind::Culling;
  if (name == "reduction" || name == "transmission_reduction") {
    return PolicyKind::TransmissionReduction;
  }
  throw std::invalid_argument("policy must be one of vaccination|isolation|culling|reduction, got '" + name + "'");
}

void ModelParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) fail_field("beta", "must be > 0 and finite", beta);
  if (!(mu > 0.0) || !std::isfinite(mu)) fail_field("mu", "must be > 0 and finite", mu);
  if (!(s0 > 0.0) || !std::isfinite(s0)) fail_field("s0", "must be > 0 and finite", s0);
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) fail_field("eps", "must lie in (0,1)", epsilon);
  if (!(i0 > epsilon) || !std::isfinite(i0)) fail_field("i0", "must be > eps", i0);
}

Policy Policy::make(PolicyKind kind, double u_max) {
  Policy pol{kind, u_max, 0.0, 0.0};
  switch (kind) {
    case PolicyKind::Vaccination: pol.alpha1 = 1.0; pol.alpha2 = 0.0; break;
    case PolicyKind::Isolation: pol.alpha1 = 0.0; pol.alpha2 = 1.0; break;
    case PolicyKind::Culling: pol.alpha1 = 1.0; pol.alpha2 = 1.0; break;
    case PolicyKind::TransmissionReduction: break;  // alphas unused
  }
  pol.validate();
  return pol;
}

void Policy::validate() const {
  if (!(u_max >= 0.0) || !std::isfinite(u_max)) fail_field("u_max", "must be >= 0 and finite", u_max);
  if (kind == PolicyKind::TransmissionReduction && u_max > 1.0) {
    fail_field("u_max", "must be <= 1 for the reduction policy", u_max);
  }
  switch (kind) {
    case PolicyKind::Vaccination:
      if (alpha1 != 1.0 || alpha2 != 0.0) fail_field("alpha1", "vaccination requires (alpha1,alpha2)=(1,0); alpha1", alpha1);
      break;
    case PolicyKind::Isolation:
      if (alpha1 != 0.0 || alpha2 != 1.0) fail_field("alpha1", "isolation requires (alpha1,alpha2)=(0,1); alpha1", alpha1);
      break;
    case PolicyKind::Culling:
      if (alpha1 != 1.0 || alpha2 != 1.0) fail_field("alpha1", "culling requires (alpha1,alpha2)=(1,1); alpha1", alpha1);
      break;
    case PolicyKind::TransmissionReduction:
      break;
  }
}

double r0(const ModelParams& p) {
  return p.beta * p.s0 / p.mu;
}

double rc(const ModelParams& p, const Policy& pol) {
  switch (pol.kind) {
    case PolicyKind::Vaccination:
      return p.beta * p.s0 / p.mu;
    case PolicyKind::Isolation:
    case PolicyKind::Culling:
      return p.beta * p.s0 / (p.mu + pol.u_max);
    case PolicyKind::TransmissionReduction:
      return p.beta * p.s0 * (1.0 - pol.u_max) / p.mu;
  }
  throw std::logic_error("rc: unreachable policy kind");
}

}  // namespace sirtoc
