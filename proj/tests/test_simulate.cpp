#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "prodprice/errors.hpp"
#include "prodprice/simulate.hpp"
#include "support/oracles.hpp"

using namespace prodprice;

namespace {

struct Solved {
  ValidatedProblem p;
  HamiltonianModel h;
  ValueFunction vf;
};

Solved solve(const ProblemSpec& spec) {
  ValidatedProblem p = validate_problem(spec);
  HamiltonianModel h = build_hamiltonian(p);
  ValueFunction vf = build_value(h, p.beta());
  return {std::move(p), std::move(h), std::move(vf)};
}

}  // namespace

TEST_CASE("static plan accumulates the closed-form discounted payoff") {
  const Solved s = solve(builtin_arvan_moses(4.0, 0.5, 1.0, 1.0));
  const double u = 2.0;
  const Trajectory tr = simulate(s.p, StaticPlan{u}, 0.0, 10.0, 0.0);
  const double rate = s.p.revenue(u) - s.p.cost(u);
  CHECK(tr.total() == doctest::Approx(rate * (1.0 - std::exp(-10.0))).epsilon(1e-12));
  CHECK(tr.x.back() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tr.horizon() == doctest::Approx(10.0));
}

TEST_CASE("drawdown plans are near optimal") {
  const Solved s = solve(builtin_arvan_moses(1.0, 1.0, 1.0, 1.0));
  for (const double x0 : {0.02, 0.1, 0.4}) {
    const DrawdownPlan plan = drawdown_plan(s.p, s.vf, x0);
    const Trajectory tr = simulate(s.p, plan, x0, 60.0, 0.0);
    CHECK(std::abs(profit_gap(tr, s.vf, x0)) < 1e-6);
    for (const double x : tr.x) CHECK(x >= -1e-9);
  }
}

TEST_CASE("relaxed tail freezes inventory and earns the relaxed rate") {
  const Solved s = solve(builtin_arvan_moses(1.0, 1.0, 1.0, 1.0));
  const TailPlan tail = make_tail(s.p, s.h, {});
  REQUIRE(std::holds_alternative<RelaxedStatic>(tail));
  const Trajectory tr = simulate(s.p, std::get<RelaxedStatic>(tail), 0.0, 60.0, 0.0);
  CHECK(tr.relaxed.back() != 0);
  CHECK(tr.x.back() == 0.0);
  CHECK(std::abs(profit_gap(tr, s.vf, 0.0)) < 1e-8);
}

TEST_CASE("cyclic plans respect the peak bound") {
  const Solved s = solve(builtin_arvan_moses(1.0, 1.0, 1.0, 1.0));
  const TailPlan tail = make_tail(s.p, s.h, {TailKind::kCyclic, 0.1});
  const CyclicPlan& c = std::get<CyclicPlan>(tail);
  const Trajectory tr = simulate(s.p, c, 0.0, 20.0, 0.0);
  const double peak = *std::max_element(tr.x.begin(), tr.x.end());
  CHECK(peak <= c.peak_bound() + 1e-9);
  CHECK(peak >= 0.99 * c.peak_bound());
  CHECK(*std::min_element(tr.x.begin(), tr.x.end()) >= -1e-9);
}

TEST_CASE("overselling is reported") {
  const Solved s = solve(builtin_arvan_moses(1.0, 1.0, 1.0, 1.0));
  const FeedbackLaw greedy = [](double, double) { return FeedbackControl{0.0, 0.5}; };
  CHECK_THROWS_AS(simulate(s.p, greedy, 0.1, 5.0, 0.01), StateViolation);
}

TEST_CASE("short horizons cannot certify a gap") {
  const Solved s = solve(builtin_arvan_moses(1.0, 1.0, 1.0, 1.0));
  const Trajectory tr = simulate(s.p, drawdown_plan(s.p, s.vf, 0.1), 0.1, 2.0, 0.0);
  CHECK_THROWS_AS(profit_gap(tr, s.vf, 0.1), HorizonTooShort);
}

TEST_CASE("random admissible feedback laws never beat the value") {
  const Solved s = solve(builtin_arvan_moses(1.0, 1.0, 1.0, 1.0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double a_lvl = 2.0 * u(rng);
    const double q_lvl = u(rng);
    const double x0 = 0.3 * u(rng);
    // Sell q_lvl while stock lasts, then sell at most what is produced.
    const FeedbackLaw law = [=](double, double x) {
      return FeedbackControl{a_lvl, x > 1e-3 ? q_lvl : std::min(q_lvl, a_lvl)};
    };
    const Trajectory tr = simulate(s.p, law, x0, 40.0, 1e-3);
    const double bound = s.vf.value_at(x0) + 1e-6;
    CHECK(tr.total() + std::exp(-40.0) * s.vf.value_at(tr.x.back()) <= bound);
  }
}

TEST_CASE("trajectory csv") {
  const Solved s = solve(builtin_arvan_moses(4.0, 0.5, 1.0, 1.0));
  const Trajectory tr = simulate(s.p, StaticPlan{1.0}, 0.0, 1.0, 0.25);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  CHECK(os.str().rfind("t,X,alpha,q,J\n", 0) == 0);
}
