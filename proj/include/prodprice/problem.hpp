#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace prodprice {

// ---------------------------------------------------------------------------
// Control sets. Rates are in goods per unit time.

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Finite set of admissible rates, strictly increasing.
struct FiniteSet {
  std::vector<double> values;
};

/// [lo, +inf). Only legal for the production set.
struct RightRay {
  double lo = 0.0;
};

using ControlSet = std::variant<Interval, FiniteSet, RightRay>;

double lower_bound(const ControlSet& set);
/// +inf for a RightRay.
double upper_bound(const ControlSet& set);
bool is_continuous(const ControlSet& set);
bool contains(const ControlSet& set, double x, double tol = 0.0);

// ---------------------------------------------------------------------------
// Revenue / cost curves.

/// R(q) = (a - b q) q, the revenue of a linear demand curve.
struct LinearDemandRevenue {
  double a = 1.0;
  double b = 1.0;
};

/// C(alpha) = c alpha.
struct AffineCost {
  double c = 1.0;
};

/// C(alpha) = alpha^3/3 - k alpha^2 + k^2 alpha: concave on [0,k], convex beyond.
struct CubicCost {
  double k = 1.0;
};

/// Piecewise-linear curve through (xs[i], fs[i]); xs strictly increasing.
struct Table {
  std::vector<double> xs;
  std::vector<double> fs;
};

using CurveSpec = std::variant<LinearDemandRevenue, AffineCost, CubicCost, Table>;

/// Pointwise evaluator for a CurveSpec.
///
/// Closed-form families evaluate exactly. Tables interpolate linearly between
/// knots; evaluating a table outside its knot range throws OutOfDomain unless a
/// coercive continuation was attached (see ValidatedProblem for RightRay costs).
class Curve {
 public:
  Curve() = default;
  explicit Curve(CurveSpec spec);

  double operator()(double x) const;
  const CurveSpec& spec() const { return spec_; }
  bool is_table() const { return std::holds_alternative<Table>(spec_); }
  /// Table knots (empty for closed forms).
  std::vector<double> knots() const;

  /// Extends a table beyond its last knot by the convex quadratic
  /// f_n + s_n d + s_n d^2 / (2 x_n), d = x - x_n, matching value and slope.
  void attach_quadratic_continuation();
  bool has_continuation() const { return continuation_; }

 private:
  CurveSpec spec_ = AffineCost{};
  bool continuation_ = false;
};

// ---------------------------------------------------------------------------

struct ProblemSpec {
  double beta = 1.0;  ///< discount rate, 1/time
  ControlSet q_set = Interval{0.0, 1.0};
  ControlSet a_set = Interval{0.0, 1.0};
  CurveSpec revenue = LinearDemandRevenue{};
  CurveSpec cost = AffineCost{};
  std::size_t grid_n = 4097;  ///< uniform samples per continuous control set
};

struct ValidationOptions {
  /// For an unbounded production set, C(alpha)/alpha must exceed this at the
  /// largest probe point.
  double slope_bound = 1e6;
};

/// A ProblemSpec that passed every model assumption check. Immutable.
class ValidatedProblem {
 public:
  const ProblemSpec& spec() const { return spec_; }
  double beta() const { return spec_.beta; }
  std::size_t grid_n() const { return spec_.grid_n; }

  double revenue(double q) const { return revenue_(q); }
  double cost(double a) const { return cost_(a); }
  const Curve& revenue_curve() const { return revenue_; }
  const Curve& cost_curve() const { return cost_; }

  const ControlSet& q_set() const { return spec_.q_set; }
  const ControlSet& a_set() const { return spec_.a_set; }
  bool q_continuous() const { return is_continuous(spec_.q_set); }
  bool a_continuous() const { return is_continuous(spec_.a_set); }
  bool a_unbounded() const { return std::holds_alternative<RightRay>(spec_.a_set); }
  double q_max() const { return upper_bound(spec_.q_set); }

  /// Sorted sample points of Q: the uniform grid plus table knots in range,
  /// or the set itself when finite.
  std::vector<double> q_samples() const;
  /// Same for A; `upper` truncates an unbounded set and is ignored otherwise.
  std::vector<double> a_samples(double upper) const;

 private:
  friend ValidatedProblem validate_problem(const ProblemSpec&, const ValidationOptions&);
  ValidatedProblem(ProblemSpec spec, Curve revenue, Curve cost)
      : spec_(std::move(spec)), revenue_(std::move(revenue)), cost_(std::move(cost)) {}

  ProblemSpec spec_;
  Curve revenue_;
  Curve cost_;
};

/// Checks 0 in A and Q, nontrivial A and Q, R(0)=0, R>=0, C>=0 non-decreasing,
/// and 1-coercivity of C when A is unbounded.
ValidatedProblem validate_problem(const ProblemSpec& spec, const ValidationOptions& opts = {});

/// Sorted sample points of a control set. Continuous sets get `n` uniform
/// points on [lo, hi] (hi replaced by `ray_upper` for a RightRay) merged with
/// `extra` knots falling inside.
std::vector<double> sample_control_set(const ControlSet& set, std::size_t n, double ray_upper,
                                       const std::vector<double>& extra = {});

/// Second differences of f on a uniform n-point grid over [lo, hi] are all
/// <= 1e-12 * scale.
bool is_concave_on(const Curve& f, double lo, double hi, std::size_t n = 4097);

/// Linear cost C = c alpha on A = [0, alpha_bar], Q = [0, q_bar].
/// Throws InvalidParameter on non-positive inputs or a non-concave revenue.
ProblemSpec builtin_linear_cost(double c, double alpha_bar, double q_bar, const CurveSpec& revenue,
                                double beta);

/// Linear demand with the concave-convex cubic cost: Q = [0, a/b],
/// A = [0, inf), R = (a - b q) q, C = alpha^3/3 - k alpha^2 + k^2 alpha.
ProblemSpec builtin_arvan_moses(double a, double b, double k, double beta);

}  // namespace prodprice
