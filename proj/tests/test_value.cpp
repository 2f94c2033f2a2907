#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "prodprice/value.hpp"
#include "support/oracles.hpp"

using namespace prodprice;

namespace {

const oracle::LinearCost kLc;

ValueFunction lc_value() {
  const ValidatedProblem p =
      validate_problem(builtin_linear_cost(kLc.c, kLc.abar, 1.0, LinearDemandRevenue{1.0, 1.0}, kLc.beta));
  return build_value(build_hamiltonian(p), p.beta());
}

ValueFunction am_value(double a, double b, double k, double beta) {
  const ValidatedProblem p = validate_problem(builtin_arvan_moses(a, b, k, beta));
  return build_value(build_hamiltonian(p), beta);
}

}  // namespace

TEST_CASE("psi matches the closed-form antiderivative") {
  const ValueFunction vf = lc_value();
  for (const double xi : {0.39, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05, 0.01, 0.001}) {
    CHECK(vf.psi(xi) == doctest::Approx(kLc.psi(xi)).epsilon(1e-9));
  }
  CHECK(vf.psi(vf.zeta()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("value and marginal value against the closed form") {
  const ValueFunction vf = lc_value();
  for (const double x : oracle::linspace(0.0, 1.0, 41)) {
    CHECK(vf.value_at(x) == doctest::Approx(kLc.value(x)).epsilon(1e-9));
    CHECK(vf.v_prime(x) == doctest::Approx(kLc.xi_of(x)).epsilon(1e-8));
  }
  CHECK(vf.value_at(0.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(vf.v_prime(kLc.x_hat()) == doctest::Approx(kLc.c).epsilon(1e-8));
}

TEST_CASE("large inventories approach H(0)/beta") {
  const ValueFunction vf = lc_value();
  const double cap = vf.H_at_0() / vf.beta();
  CHECK(vf.value_at(50.0) <= cap + 1e-12);
  CHECK(vf.value_at(50.0) == doctest::Approx(cap).epsilon(1e-6));
  CHECK(vf.v_prime(50.0) >= 0.0);
  CHECK(vf.v_prime(50.0) < 1e-6);
}

TEST_CASE("finite differences of v reproduce v'") {
  const ValueFunction vf = am_value(1.0, 1.0, 1.0, 1.0);
  const double h = 1e-5;
  for (const double x : {0.05, 0.2, 0.5, 1.0, 3.0}) {
    const double fd = (vf.value_at(x + h) - vf.value_at(x - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(vf.v_prime(x)).epsilon(1e-6));
  }
}

TEST_CASE("marginal value starts at zeta and decreases") {
  const ValueFunction vf = am_value(4.0, 0.5, 1.0, 0.7);
  CHECK(vf.v_prime(0.0) == doctest::Approx(vf.zeta()).epsilon(1e-12));
  double prev = vf.v_prime(0.0);
  for (const double x : oracle::linspace(0.01, 20.0, 200)) {
    const double cur = vf.v_prime(x);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("HJB residuals") {
  const ValueFunction vf = am_value(1.0, 1.0, 1.0, 1.0);
  const HamiltonianModel& h = vf.hamiltonian();
  for (const double x : {0.0, 0.1, 1.0, 5.0}) CHECK(std::abs(hjb_residual(vf, h, x)) < 1e-12);
  // A wrong slope leaves a visible residual.
  CHECK(std::abs(hjb_residual(h, 1.0, vf.value_at(0.1), 0.5 * vf.v_prime(0.1))) > 1e-4);
}

TEST_CASE("zero marginal value at zero inventory gives a constant value") {
  ProblemSpec s;
  s.beta = 0.5;
  s.q_set = Interval{0.0, 1.0};
  s.a_set = Interval{0.0, 2.0};
  s.revenue = LinearDemandRevenue{1.0, 1.0};
  s.cost = Table{{0.0, 2.0}, {0.0, 0.0}};
  const ValidatedProblem p = validate_problem(s);
  const ValueFunction vf = build_value(build_hamiltonian(p), p.beta());
  CHECK(vf.constant());
  CHECK(vf.value_at(0.0) == doctest::Approx(0.25 / 0.5));
  CHECK(vf.value_at(3.0) == doctest::Approx(0.25 / 0.5));
  CHECK(vf.v_prime(1.0) == 0.0);
}

TEST_CASE("value csv") {
  const ValueFunction vf = lc_value();
  std::ostringstream os;
  write_value_csv(os, vf, {0.0, 0.1});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,v,v_prime");
  std::getline(in, line);
  CHECK(line.rfind("0,0.30000000000000", 0) == 0);
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}
