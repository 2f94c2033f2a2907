#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "prodprice/errors.hpp"
#include "prodprice/hamiltonian.hpp"
#include "support/oracles.hpp"

using namespace prodprice;

namespace {

HamiltonianModel am_model(double a, double b, double k) {
  return build_hamiltonian(validate_problem(builtin_arvan_moses(a, b, k, 1.0)));
}

}  // namespace

TEST_CASE("H matches the closed-form conjugates for the cubic family") {
  for (const auto& [a, b, k] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{0.2, 1.0, 1.0}, std::tuple{4.0, 0.5, 1.0}}) {
    const oracle::LinearCubic ref{a, b, k};
    const HamiltonianModel h = am_model(a, b, k);
    for (const double z : oracle::linspace(0.0, std::min(h.z_max(), 3.0), 61)) {
      CHECK(h(z) == doctest::Approx(ref.h(z)).epsilon(1e-8));
    }
  }
}

TEST_CASE("H for the linear-cost example") {
  const oracle::LinearCost lc;
  const HamiltonianModel h =
      build_hamiltonian(validate_problem(builtin_linear_cost(lc.c, lc.abar, 1.0, LinearDemandRevenue{1.0, 1.0}, lc.beta)));
  for (const double z : oracle::linspace(0.0, 1.5, 31)) CHECK(h(z) == doctest::Approx(lc.h(z)).epsilon(1e-10));
  CHECK(h.zeta() == doctest::Approx(0.4).epsilon(1e-9));
  // Production switches on at z = c.
  const Subgradient below = h.subgradient(0.19);
  const Subgradient above = h.subgradient(0.21);
  CHECK(above.h_plus - below.h_plus == doctest::Approx(0.3 + 0.01).epsilon(1e-6));
  REQUIRE_FALSE(h.kinks().empty());
  CHECK(std::abs(h.kinks().front() - 0.2) < 1e-9);
}

TEST_CASE("least minimizer picks the left end of a flat bottom") {
  // A ≤ K²/4: H vanishes on [A, K²/4].
  const HamiltonianModel h = am_model(0.2, 1.0, 1.0);
  const MinimizerSet m = least_minimizer(h);
  CHECK(m.zeta == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(m.m_hi == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(h(m.zeta) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("subgradient brackets zero at zeta") {
  for (const double a : {0.5, 1.0, 2.0, 6.0}) {
    const HamiltonianModel h = am_model(a, 1.0, 1.0);
    const Subgradient s = subgradient(h, h.zeta());
    CHECK(s.h_minus <= 1e-6);
    CHECK(s.h_plus >= -1e-6);
    CHECK(h.zeta() == doctest::Approx(oracle::LinearCubic{a, 1.0, 1.0}.zeta()).epsilon(1e-7));
  }
}

TEST_CASE("zeta does not depend on the starting truncation") {
  const ValidatedProblem p = validate_problem(builtin_arvan_moses(4.0, 0.5, 1.0, 1.0));
  const double z0 = build_hamiltonian(p).zeta();
  for (const double c : {1.0, 10.0, 100.0}) {
    HamiltonianOptions o;
    o.trunc_bound = c;
    CHECK(build_hamiltonian(p, o).zeta() == doctest::Approx(z0).epsilon(1e-9));
  }
}

TEST_CASE("domain errors") {
  const HamiltonianModel h = am_model(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(h(-0.1), OutOfDomain);
  CHECK_THROWS_AS(h(2.0 * h.z_max()), OutOfDomain);
  CHECK(h.z_grid().size() == h.values().size());
  CHECK(h.z_grid().back() == doctest::Approx(h.z_max()));
}

TEST_CASE("finite control sets") {
  ProblemSpec s;
  s.beta = 1.0;
  s.q_set = FiniteSet{{0.0, 0.5, 1.0}};
  s.a_set = FiniteSet{{0.0, 2.0}};
  s.revenue = LinearDemandRevenue{1.0, 0.5};
  s.cost = AffineCost{0.3};
  const HamiltonianModel h = build_hamiltonian(validate_problem(s));
  auto r = [](double q) { return (1.0 - 0.5 * q) * q; };
  auto c = [](double a) { return 0.3 * a; };
  for (const double z : oracle::linspace(0.0, h.z_max(), 25)) {
    const double ref = oracle::brute_revenue_conjugate(r, {0.0, 0.5, 1.0}, z) +
                       oracle::brute_cost_conjugate(c, {0.0, 2.0}, z);
    CHECK(h(z) == doctest::Approx(ref).epsilon(1e-12));
  }
}
