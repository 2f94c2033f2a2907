#include "prodprice/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "prodprice/errors.hpp"

namespace prodprice {

const char* to_string(Assumption a) {
  switch (a) {
    case Assumption::kBetaNonPositive: return "beta must be positive";
    case Assumption::kZeroNotInQ: return "0 \xE2\x88\x89 Q";
    case Assumption::kZeroNotInA: return "0 \xE2\x88\x89 A";
    case Assumption::kQOnlyZero: return "Q\\{0} is empty";
    case Assumption::kAOnlyZero: return "A\\{0} is empty";
    case Assumption::kBadControlSet: return "malformed control set";
    case Assumption::kRayNotAllowedForQ: return "Q must be compact";
    case Assumption::kBadTable: return "malformed table";
    case Assumption::kTableDoesNotCover: return "table does not cover the control set";
    case Assumption::kRevenueNonzeroAtZero: return "R(0) != 0";
    case Assumption::kRevenueNegative: return "R negative";
    case Assumption::kCostNegative: return "C negative/decreasing";
    case Assumption::kCostDecreasing: return "C negative/decreasing";
    case Assumption::kCostNotCoercive: return "C is not 1-coercive";
  }
  return "unknown assumption";
}

// ---------------------------------------------------------------------------

double lower_bound(const ControlSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          return s.values.empty() ? std::numeric_limits<double>::quiet_NaN() : s.values.front();
        } else {
          return s.lo;
        }
      },
      set);
}

double upper_bound(const ControlSet& set) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return s.hi;
        } else if constexpr (std::is_same_v<T, FiniteSet>) {
          return s.values.empty() ? std::numeric_limits<double>::quiet_NaN() : s.values.back();
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      set);
}

bool is_continuous(const ControlSet& set) { return !std::holds_alternative<FiniteSet>(set); }

bool contains(const ControlSet& set, double x, double tol) {
  if (const auto* fs = std::get_if<FiniteSet>(&set)) {
    return std::any_of(fs->values.begin(), fs->values.end(),
                       [&](double v) { return std::abs(v - x) <= tol; });
  }
  return x >= lower_bound(set) - tol && x <= upper_bound(set) + tol;
}

// ---------------------------------------------------------------------------

Curve::Curve(CurveSpec spec) : spec_(std::move(spec)) {}

std::vector<double> Curve::knots() const {
  if (const auto* t = std::get_if<Table>(&spec_)) return t->xs;
  return {};
}

void Curve::attach_quadratic_continuation() { continuation_ = is_table(); }

namespace {

double eval_table(const Table& t, double x, bool continuation) {
  const auto& xs = t.xs;
  const auto& fs = t.fs;
  if (x <= xs.front()) {
    if (x < xs.front()) throw OutOfDomain("table evaluated below its first knot");
    return fs.front();
  }
  if (x >= xs.back()) {
    if (x == xs.back()) return fs.back();
    if (!continuation) throw OutOfDomain("table evaluated beyond its last knot");
    const std::size_t n = xs.size();
    const double slope = (fs[n - 1] - fs[n - 2]) / (xs[n - 1] - xs[n - 2]);
    const double d = x - xs.back();
    return fs.back() + slope * d + slope * d * d / (2.0 * xs.back());
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return fs[i - 1] + w * (fs[i] - fs[i - 1]);
}

}  // namespace

double Curve::operator()(double x) const {
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, LinearDemandRevenue>) {
          return (c.a - c.b * x) * x;
        } else if constexpr (std::is_same_v<T, AffineCost>) {
          return c.c * x;
        } else if constexpr (std::is_same_v<T, CubicCost>) {
          return x * x * x / 3.0 - c.k * x * x + c.k * c.k * x;
        } else {
          return eval_table(c, x, continuation_);
        }
      },
      spec_);
}

// ---------------------------------------------------------------------------

std::vector<double> sample_control_set(const ControlSet& set, std::size_t n, double ray_upper,
                                       const std::vector<double>& extra) {
  if (const auto* fs = std::get_if<FiniteSet>(&set)) return fs->values;
  const double lo = lower_bound(set);
  const double hi = std::holds_alternative<RightRay>(set) ? ray_upper : upper_bound(set);
  if (!(hi > lo) || n < 2) throw DegenerateGrid("control set sample needs hi > lo and n >= 2");
  std::vector<double> xs;
  xs.reserve(n + extra.size());
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  }
  for (double e : extra) {
    if (e > lo && e < hi) xs.push_back(e);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<double> ValidatedProblem::q_samples() const {
  return sample_control_set(spec_.q_set, spec_.grid_n, 0.0, revenue_.knots());
}

std::vector<double> ValidatedProblem::a_samples(double upper) const {
  return sample_control_set(spec_.a_set, spec_.grid_n, upper, cost_.knots());
}

bool is_concave_on(const Curve& f, double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = f(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    scale = std::max(scale, std::abs(v[i]));
  }
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (v[i + 1] - 2.0 * v[i] + v[i - 1] > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

void check_set(const ControlSet& set, bool is_q) {
  const Assumption zero = is_q ? Assumption::kZeroNotInQ : Assumption::kZeroNotInA;
  const Assumption only = is_q ? Assumption::kQOnlyZero : Assumption::kAOnlyZero;
  const char* name = is_q ? "Q" : "A";
  if (const auto* iv = std::get_if<Interval>(&set)) {
    if (!(iv->lo >= 0.0) || !(iv->hi > iv->lo) || !std::isfinite(iv->hi)) {
      throw AssumptionViolation(Assumption::kBadControlSet,
                                std::string(name) + " interval needs 0 <= lo < hi < inf");
    }
    if (iv->lo != 0.0) throw AssumptionViolation(zero, "");
  } else if (const auto* fs = std::get_if<FiniteSet>(&set)) {
    const auto& v = fs->values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] >= 0.0) || !std::isfinite(v[i]) || (i > 0 && !(v[i] > v[i - 1]))) {
        throw AssumptionViolation(Assumption::kBadControlSet,
                                  std::string(name) + " values must be finite, >= 0, strictly increasing");
      }
    }
    if (v.empty() || v.front() != 0.0) throw AssumptionViolation(zero, "");
    if (v.size() < 2) throw AssumptionViolation(only, "");
  } else {
    const auto& ray = std::get<RightRay>(set);
    if (is_q) throw AssumptionViolation(Assumption::kRayNotAllowedForQ, "");
    if (ray.lo != 0.0) throw AssumptionViolation(zero, "");
  }
}

void check_table(const CurveSpec& c, const ControlSet& set, const char* name) {
  const auto* t = std::get_if<Table>(&c);
  if (!t) return;
  if (t->xs.size() < 2 || t->xs.size() != t->fs.size()) {
    throw AssumptionViolation(Assumption::kBadTable, std::string(name) + " table needs >= 2 (x, f) pairs");
  }
  for (std::size_t i = 0; i < t->xs.size(); ++i) {
    if (!std::isfinite(t->xs[i]) || !std::isfinite(t->fs[i]) || (i > 0 && !(t->xs[i] > t->xs[i - 1]))) {
      throw AssumptionViolation(Assumption::kBadTable,
                                std::string(name) + " table x-values must be finite and strictly increasing");
    }
  }
  const double lo = lower_bound(set);
  const double hi = upper_bound(set);
  if (t->xs.front() > lo || (std::isfinite(hi) && t->xs.back() < hi)) {
    throw AssumptionViolation(Assumption::kTableDoesNotCover, name);
  }
}

// Points used to probe the sign and monotonicity checks.
std::vector<double> probe_points(const ValidatedProblem& p, bool revenue) {
  if (revenue) return p.q_samples();
  if (!p.a_unbounded()) return p.a_samples(0.0);
  double scale = 1.0;
  if (const auto* t = std::get_if<Table>(&p.spec().cost)) scale = std::max(scale, t->xs.back());
  if (const auto* cc = std::get_if<CubicCost>(&p.spec().cost)) scale = std::max(scale, 2.0 * cc->k);
  std::vector<double> xs = p.a_samples(4.0 * scale);
  for (int k = -20; k <= 40; ++k) xs.push_back(scale * std::ldexp(1.0, k));
  std::sort(xs.begin(), xs.end());
  return xs;
}

void check_coercive(const Curve& cost, const ValidationOptions& opts) {
  double base = 1.0;
  if (const auto* t = std::get_if<Table>(&cost.spec())) base = std::max(base, t->xs.back());
  constexpr int kProbes = 41;
  std::vector<double> ratio(kProbes);
  for (int k = 0; k < kProbes; ++k) {
    const double a = base * std::ldexp(1.0, k);
    ratio[k] = cost(a) / a;
  }
  // Knee: the ratio must increase strictly over the trailing probes.
  int knee = kProbes - 1;
  while (knee > 0 && ratio[knee] > ratio[knee - 1]) --knee;
  if (kProbes - 1 - knee < 8 || !(ratio.back() > opts.slope_bound)) {
    std::ostringstream os;
    os << "C(a)/a reaches only " << ratio.back() << " at a=" << base * std::ldexp(1.0, kProbes - 1);
    throw AssumptionViolation(Assumption::kCostNotCoercive, os.str());
  }
}

}  // namespace

ValidatedProblem validate_problem(const ProblemSpec& spec, const ValidationOptions& opts) {
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta)) {
    throw AssumptionViolation(Assumption::kBetaNonPositive, "");
  }
  if (spec.grid_n < 3) throw InvalidParameter("grid_n must be at least 3");
  check_set(spec.q_set, true);
  check_set(spec.a_set, false);
  check_table(spec.revenue, spec.q_set, "revenue");
  check_table(spec.cost, spec.a_set, "cost");

  Curve revenue(spec.revenue);
  Curve cost(spec.cost);
  const bool ray = std::holds_alternative<RightRay>(spec.a_set);
  if (ray && cost.is_table()) {
    // Growth must be visible in the table tail before it is continued.
    const auto& t = std::get<Table>(spec.cost);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < t.xs.size(); ++i) {
      if (t.xs[i] > 0.0) ratios.push_back(t.fs[i] / t.xs[i]);
    }
    const std::size_t m = ratios.size();
    if (m < 3 || !(ratios[m - 1] > ratios[m - 2] && ratios[m - 2] > ratios[m - 3])) {
      throw CoercivityUndetectable(
          "unbounded A with a cost table whose tail does not show C(a)/a increasing");
    }
    const std::size_t n = t.xs.size();
    if (!(t.fs[n - 1] - t.fs[n - 2] > 0.0)) {
      throw CoercivityUndetectable("cost table must end with a strictly increasing segment");
    }
    cost.attach_quadratic_continuation();
  }

  ValidatedProblem p(spec, revenue, cost);

  const double r0 = revenue(0.0);
  const auto qs = probe_points(p, true);
  double r_scale = 0.0;
  std::vector<double> rv(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    rv[i] = revenue(qs[i]);
    r_scale = std::max(r_scale, std::abs(rv[i]));
  }
  const double r_tol = 1e-12 * std::max(r_scale, 1.0);
  if (std::abs(r0) > r_tol) throw AssumptionViolation(Assumption::kRevenueNonzeroAtZero, "");
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (rv[i] < -r_tol) {
      std::ostringstream os;
      os << "R(" << qs[i] << ") = " << rv[i];
      throw AssumptionViolation(Assumption::kRevenueNegative, os.str());
    }
  }

  const auto as = probe_points(p, false);
  std::vector<double> cv(as.size());
  double c_scale = 0.0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    cv[i] = cost(as[i]);
    c_scale = std::max(c_scale, std::abs(cv[i]));
  }
  const double c_tol = 1e-12 * std::max(c_scale, 1.0);
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (cv[i] < -c_tol) {
      std::ostringstream os;
      os << "C(" << as[i] << ") = " << cv[i] << " < 0";
      throw AssumptionViolation(Assumption::kCostNegative, os.str());
    }
    if (i > 0 && cv[i] < cv[i - 1] - c_tol) {
      std::ostringstream os;
      os << "C decreases between " << as[i - 1] << " and " << as[i];
      throw AssumptionViolation(Assumption::kCostDecreasing, os.str());
    }
  }
  if (ray) check_coercive(cost, opts);
  return p;
}

// ---------------------------------------------------------------------------

ProblemSpec builtin_linear_cost(double c, double alpha_bar, double q_bar, const CurveSpec& revenue,
                                double beta) {
  if (!(c > 0.0) || !(alpha_bar > 0.0) || !(q_bar > 0.0) || !(beta > 0.0)) {
    throw InvalidParameter("linear-cost family needs c, alpha_bar, q_bar, beta > 0");
  }
  if (!is_concave_on(Curve(revenue), 0.0, q_bar)) {
    throw InvalidParameter("revenue not concave on [0, q_bar]");
  }
  ProblemSpec s;
  s.beta = beta;
  s.q_set = Interval{0.0, q_bar};
  s.a_set = Interval{0.0, alpha_bar};
  s.revenue = revenue;
  s.cost = AffineCost{c};
  return s;
}

ProblemSpec builtin_arvan_moses(double a, double b, double k, double beta) {
  if (!(a > 0.0) || !(b > 0.0) || !(k > 0.0) || !(beta > 0.0)) {
    throw InvalidParameter("concave-convex cost family needs A, B, K, beta > 0");
  }
  ProblemSpec s;
  s.beta = beta;
  s.q_set = Interval{0.0, a / b};
  s.a_set = RightRay{0.0};
  s.revenue = LinearDemandRevenue{a, b};
  s.cost = CubicCost{k};
  return s;
}

}  // namespace prodprice
