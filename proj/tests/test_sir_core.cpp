#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sirtoc/sir_core.hpp"

using namespace sirtoc;

namespace {

const ModelParams kFig2Params{0.0075, 5.0, 2000.0, 1.0, 0.5};  // R0 = 3

}  // namespace

TEST_CASE("parameter invariants reject bad fields by name") {
  auto bad = [](ModelParams p) {
    try {
      p.validate();
      return std::string("no error");
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
  };
  CHECK(bad({0.0, 5, 2000, 1, 0.5}).find("beta") == 0);
  CHECK(bad({0.0075, -1, 2000, 1, 0.5}).find("mu") == 0);
  CHECK(bad({0.0075, 5, 0, 1, 0.5}).find("s0") == 0);
  CHECK(bad({0.0075, 5, 2000, 1, 1.5}).find("eps") == 0);
  CHECK(bad({0.0075, 5, 2000, 1, 0.0}).find("eps") == 0);
  CHECK(bad({0.0075, 5, 2000, 0.4, 0.5}).find("i0") == 0);
  CHECK_NOTHROW(kFig2Params.validate());
}

TEST_CASE("policy coefficients follow the kind") {
  const Policy v = Policy::make(PolicyKind::Vaccination, 2.0);
  CHECK(v.alpha1 == 1.0);
  CHECK(v.alpha2 == 0.0);
  const Policy q = Policy::make(PolicyKind::Isolation, 2.0);
  CHECK(q.alpha1 == 0.0);
  CHECK(q.alpha2 == 1.0);
  const Policy c = Policy::make(PolicyKind::Culling, 2.0);
  CHECK(c.alpha1 == 1.0);
  CHECK(c.alpha2 == 1.0);

  CHECK_NOTHROW(Policy::make(PolicyKind::TransmissionReduction, 1.0));
  CHECK_NOTHROW(Policy::make(PolicyKind::Culling, 0.0));  // do-nothing baseline
  CHECK_THROWS_AS(Policy::make(PolicyKind::TransmissionReduction, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(Policy::make(PolicyKind::Vaccination, -1.0), std::invalid_argument);
}

TEST_CASE("vector_field matches the uncontrolled flow when u = 0") {
  const Policy pol = Policy::make(PolicyKind::Vaccination, 3.0);
  for (const State x : {State{2000, 1}, State{500, 120}, State{0, 7}, State{42, 0}}) {
    const Deriv d = vector_field(kFig2Params, pol, x, 0.0);
    CHECK(d.ds == doctest::Approx(-0.0075 * x.s * x.i).epsilon(1e-14));
    CHECK(d.di == doctest::Approx(0.0075 * x.s * x.i - 5.0 * x.i).epsilon(1e-14));
  }
}

TEST_CASE("culling term: hand-evaluated flow at (2000,1), u=2") {
  const Policy pol = Policy::make(PolicyKind::Culling, 2.0);
  const Deriv d = vector_field(kFig2Params, pol, {2000.0, 1.0}, 2.0);
  CHECK(d.ds == doctest::Approx(-4015.0).epsilon(1e-13));
  CHECK(d.di == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("full transmission reduction leaves only removal") {
  const Policy pol = Policy::make(PolicyKind::TransmissionReduction, 1.0);
  for (const State x : {State{2000, 1}, State{11, 300}}) {
    const Deriv d = vector_field(kFig2Params, pol, x, 1.0);
    CHECK(d.ds == 0.0);
    CHECK(d.di == doctest::Approx(-5.0 * x.i).epsilon(1e-14));
  }
}

TEST_CASE("vector_field rejects out-of-range inputs") {
  const Policy pol = Policy::make(PolicyKind::Isolation, 2.0);
  CHECK_THROWS_AS(vector_field(kFig2Params, pol, {2000, 1}, 2.5), std::domain_error);
  CHECK_THROWS_AS(vector_field(kFig2Params, pol, {2000, 1}, -0.1), std::domain_error);
  CHECK_THROWS_AS(vector_field(kFig2Params, pol, {-1, 1}, 1.0), std::domain_error);
  CHECK_THROWS_AS(vector_field(kFig2Params, pol, {2000, -2}, 1.0), std::domain_error);
}

TEST_CASE("reproduction numbers") {
  CHECK(r0(kFig2Params) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r0({0.005, 5, 2000, 1, 0.5}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r0({1e-12, 5, 2000, 1, 0.5}) < 1e-8);

  const ModelParams p2{0.005, 5, 2000, 1, 0.5};
  CHECK(rc(p2, Policy::make(PolicyKind::Isolation, 5.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rc(kFig2Params, Policy::make(PolicyKind::TransmissionReduction, 1.0)) == 0.0);

  for (auto kind : {PolicyKind::Vaccination, PolicyKind::Isolation, PolicyKind::Culling,
                    PolicyKind::TransmissionReduction}) {
    CHECK(rc(kFig2Params, Policy::make(kind, 0.0)) ==
          doctest::Approx(r0(kFig2Params)).epsilon(1e-14));
  }
}

TEST_CASE("field properties over random admissible inputs") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const PolicyKind kinds[] = {PolicyKind::Vaccination, PolicyKind::Isolation, PolicyKind::Culling,
                              PolicyKind::TransmissionReduction};
  for (int trial = 0; trial < 400; ++trial) {
    const PolicyKind kind = kinds[trial % 4];
    const double cap = kind == PolicyKind::TransmissionReduction ? 1.0 : 8.0;
    const Policy pol = Policy::make(kind, cap * u01(rng));
    const ModelParams p{0.0001 + 0.02 * u01(rng), 0.2 + 8.0 * u01(rng), 10.0 + 4000.0 * u01(rng),
                        0.6 + 100.0 * u01(rng), 0.5};
    const State x{5000.0 * u01(rng), 500.0 * u01(rng)};
    const double u = pol.u_max * u01(rng);
    const Deriv d = vector_field(p, pol, x, u);

    // susceptibles never increase
    CHECK(d.ds <= 1e-12);
    // total population decays at least as fast as removal
    CHECK(d.ds + d.di <= -p.mu * x.i + 1e-9 * (1.0 + std::abs(d.ds)));
    // vaccination does not touch the infected equation
    if (kind == PolicyKind::Vaccination) {
      const Deriv d0 = vector_field(p, pol, x, 0.0);
      CHECK(d.di == doctest::Approx(d0.di).epsilon(1e-14));
    }
  }
}

TEST_CASE("rc is nonincreasing in u_max") {
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (auto kind : {PolicyKind::Vaccination, PolicyKind::Isolation, PolicyKind::Culling,
                    PolicyKind::TransmissionReduction}) {
    for (int trial = 0; trial < 100; ++trial) {
      const double cap = kind == PolicyKind::TransmissionReduction ? 1.0 : 12.0;
      double u1 = cap * u01(rng);
      double u2 = cap * u01(rng);
      if (u1 > u2) std::swap(u1, u2);
      const ModelParams p{0.001 + 0.01 * u01(rng), 1.0 + 6.0 * u01(rng), 2000, 1, 0.5};
      CHECK(rc(p, Policy::make(kind, u2)) <= rc(p, Policy::make(kind, u1)) + 1e-12);
    }
  }
}

TEST_CASE("policy kind names round-trip") {
  for (auto kind : {PolicyKind::Vaccination, PolicyKind::Isolation, PolicyKind::Culling,
                    PolicyKind::TransmissionReduction}) {
    CHECK(policy_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(policy_kind_from_string("quarantine"), std::invalid_argument);
}
