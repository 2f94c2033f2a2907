#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "prodprice/problem.hpp"
#include "prodprice/strategy.hpp"
#include "prodprice/value.hpp"

namespace prodprice {

/// Step-end samples of a simulated plan. For relaxed segments alpha and q hold
/// the mixture means and `relaxed` is set.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> alpha;
  std::vector<double> q;
  std::vector<double> j;  ///< discounted profit accumulated up to t
  std::vector<char> relaxed;
  double beta = 1.0;

  double horizon() const { return t.back(); }
  double total() const { return j.back(); }
};

/// Integrates the plan on [0, T]. `dt` is the drawdown step (τ/1024 when
/// dt <= 0); stationary tails use max(dt, (T − τ)/4096) and cyclic tails ε/64
/// with the phase switch as a step point. Throws StateViolation when X drops
/// below −1e-9 max(1, x0).
Trajectory simulate(const ValidatedProblem& problem, const StrategyPlan& plan, double x0, double T, double dt);

using FeedbackLaw = std::function<FeedbackControl(double t, double x)>;

/// Explicit Euler with the law evaluated at the left end of each step.
Trajectory simulate(const ValidatedProblem& problem, const FeedbackLaw& law, double x0, double T, double dt);

/// (v(x0) − J_T − e^{−βT} v(X_T)) / max(|v(x0)|, 1e-12). Throws
/// HorizonTooShort when e^{−βT} max|H|/β exceeds `tol`.
double profit_gap(const Trajectory& traj, const ValueFunction& vf, double x0, double tol = 1e-6);

/// Rows `t,X,alpha,q,J` with a header, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace prodprice
