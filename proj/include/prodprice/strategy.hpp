#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "prodprice/hamiltonian.hpp"
#include "prodprice/problem.hpp"
#include "prodprice/value.hpp"

namespace prodprice {

using Runs = std::vector<std::pair<double, double>>;

struct StaticCandidate {
  double u_hat;  ///< smallest maximizer of R − C over Q∩A
  double value;  ///< R(û) − C(û)
  Runs argmax;   ///< sampled maximizer set
};

StaticCandidate static_candidate(const ValidatedProblem& problem);

struct StaticTest {
  bool optimal;
  Runs m_r;      ///< M_R(ζ)
  Runs m_c;      ///< M_C(ζ)
  Runs m_zeta;   ///< M_R(ζ) ∩ M_C(ζ), matched within delta_match
  double delta_match;
  double best_static;  ///< max of R − C over Q∩A
  double h_zeta;       ///< H(ζ)
};

StaticTest static_optimality_test(const ValidatedProblem& problem, const HamiltonianModel& h);

struct Convexified {
  double u_tilde;
  double value;  ///< R̃(ũ) − C̃(ũ)
};

/// Smallest maximizer of R̃ − C̃ over co Q ∩ co A, using the hulls held by `h`.
Convexified convexified_static(const ValidatedProblem& problem, const HamiltonianModel& h);

struct StaticPlan {
  double u;  ///< α = q = u forever
};

/// Two-point mixtures γ δ_{q1} + (1−γ) δ_{q2} and ν δ_{a1} + (1−ν) δ_{a2}.
struct RelaxedStatic {
  double q1, q2, gamma;
  double a1, a2, nu;
  double u_tilde;

  bool point_mass() const { return q1 == q2 && a1 == a2; }
  double mean_revenue(const ValidatedProblem& p) const;
  double mean_cost(const ValidatedProblem& p) const;
};

RelaxedStatic relaxed_static(const ValidatedProblem& problem, const HamiltonianModel& h, double u_tilde);

/// Produce a2 and sell q1 on [0, κε), produce a1 and sell q2 on [κε, ε), repeat.
struct CyclicPlan {
  double eps;
  double kappa;
  double a1, a2, q1, q2;

  double peak_bound() const { return kappa * (a2 - q1) * eps; }
};

using TailPlan = std::variant<StaticPlan, RelaxedStatic, CyclicPlan>;

/// Degenerates to StaticPlan{ũ} for a point-mass relaxed control.
TailPlan cyclic_strategy(const RelaxedStatic& rs, double eps);

enum class TailKind { kAuto, kStatic, kRelaxed, kCyclic };

struct TailChoice {
  TailKind kind = TailKind::kAuto;
  double eps = 0.0;  ///< period for kCyclic
};

struct FeedbackControl {
  double alpha;
  double q;
};

/// Smallest maximizers of the cost and revenue conjugates at price ξ.
FeedbackControl feedback_controls(const HamiltonianModel& h, double xi);

/// Zero-inventory tail selected by `choice`; kAuto picks the static plan iff
/// the static optimality test passes.
TailPlan make_tail(const ValidatedProblem& problem, const HamiltonianModel& h, const TailChoice& choice);

/// Drawdown of the initial inventory followed by a stationary tail.
struct DrawdownPlan {
  double x0 = 0.0;
  double tau = 0.0;
  double beta = 1.0;
  double xi0 = 0.0;          ///< v′(x0)
  bool zeta_zero = false;    ///< ζ = 0: no drawdown, the tail runs from t = 0
  std::vector<double> t;     ///< uniform grid on [0, τ]
  std::vector<double> x;     ///< X_t on that grid
  TailPlan tail;
  std::optional<ValueFunction> vf;

  /// ξ(t) = v′(x0) e^{βt}, capped at ζ.
  double price_at(double time) const;
  /// X_t from the value function (0 after τ).
  double inventory_at(double time) const;
  /// Feedback controls at time t < τ.
  FeedbackControl controls_at(double time) const;
};

/// Throws InvalidParameter for x0 <= 0.
DrawdownPlan drawdown_plan(const ValidatedProblem& problem, const ValueFunction& vf, double x0,
                           const TailChoice& choice = {});

using StrategyPlan = std::variant<StaticPlan, RelaxedStatic, CyclicPlan, DrawdownPlan>;

// ---------------------------------------------------------------------------
// Closed forms for linear demand with the concave-convex cubic cost.

enum class Regime { kI, kII, kIII };

const char* to_string(Regime r);

/// Thresholds K²/4 and 3BK + K²/4 on the demand intercept A.
Regime classify_regime(double a, double b, double k);

struct ArvanMosesReference {
  Regime regime;
  double zeta;
  double u_hat;  ///< ũ, the maximizer of R̃ − C̃
  std::optional<RelaxedStatic> relaxed;  ///< regime ii only
};

ArvanMosesReference arvan_moses_reference(double a, double b, double k);

// ---------------------------------------------------------------------------

/// Rows `t,X,alpha,q` on the drawdown grid.
void write_drawdown_csv(std::ostream& os, const DrawdownPlan& plan);
/// key=value lines describing a stationary tail.
void write_tail(std::ostream& os, const TailPlan& tail);

}  // namespace prodprice
