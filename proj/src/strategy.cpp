#include "prodprice/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <boost/math/tools/minima.hpp>

#include "prodprice/errors.hpp"

namespace prodprice {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

struct Samples {
  std::vector<double> u;
  bool continuous;
};

std::vector<double> table_knots(const ValidatedProblem& p) {
  std::vector<double> k = p.revenue_curve().knots();
  const std::vector<double> c = p.cost_curve().knots();
  k.insert(k.end(), c.begin(), c.end());
  std::sort(k.begin(), k.end());
  return k;
}

// Sample points of Q∩A.
Samples intersection_samples(const ValidatedProblem& p) {
  const double u_max = std::min(p.q_max(), upper_bound(p.a_set()));
  if (p.q_continuous() && p.a_continuous()) {
    return {sample_control_set(Interval{0.0, u_max}, p.grid_n(), u_max, table_knots(p)), true};
  }
  const double tol = 1e-12 * std::max(1.0, u_max);
  std::vector<double> out;
  if (!p.q_continuous()) {
    for (const double q : std::get<FiniteSet>(p.q_set()).values) {
      if (contains(p.a_set(), q, tol)) out.push_back(q);
    }
  } else {
    for (const double a : std::get<FiniteSet>(p.a_set()).values) {
      if (contains(p.q_set(), a, tol)) out.push_back(a);
    }
  }
  return {out, false};
}

struct GridMax {
  std::size_t k;
  double value;
  double tie;
};

// First index attaining the max of vals within the tie tolerance.
GridMax grid_argmax(const std::vector<double>& vals) {
  const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
  const double tie = 1e-12 * (*mx - *mn + std::abs(*mx)) + kTiny;
  std::size_t k = 0;
  while (vals[k] < *mx - tie) ++k;
  return {k, *mx, tie};
}

// Maximizes f near xs[k]; keeps the knot unless the refinement is strictly better.
std::pair<double, double> refine_max(const std::vector<double>& xs, std::size_t k,
                                     const std::function<double(double)>& f, double knot_val) {
  const double a = xs[k == 0 ? 0 : k - 1];
  const double b = xs[std::min(k + 1, xs.size() - 1)];
  if (!(b > a)) return {xs[k], knot_val};
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima([&](double u) { return -f(u); }, a, b,
                                                       std::numeric_limits<double>::digits / 2, iters);
  if (-r.second > knot_val) return {r.first, -r.second};
  return {xs[k], knot_val};
}

Runs intersect(const Runs& a, const Runs& b, double delta) {
  Runs out;
  for (const auto& [a0, a1] : a) {
    for (const auto& [b0, b1] : b) {
      const double lo = std::max(a0, b0);
      const double hi = std::min(a1, b1);
      if (lo <= hi + delta) out.emplace_back(std::min(lo, hi), std::max(lo, hi));
    }
  }
  return out;
}

}  // namespace

StaticCandidate static_candidate(const ValidatedProblem& problem) {
  const Samples s = intersection_samples(problem);
  auto obj = [&](double u) { return problem.revenue(u) - problem.cost(u); };
  std::vector<double> vals(s.u.size());
  std::transform(s.u.begin(), s.u.end(), vals.begin(), obj);
  const GridMax gm = grid_argmax(vals);

  StaticCandidate out{s.u[gm.k], vals[gm.k], {}};
  bool prev_in = false;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const bool in = vals[i] >= gm.value - gm.tie;
    if (in && prev_in) {
      out.argmax.back().second = s.u[i];
    } else if (in) {
      out.argmax.emplace_back(s.u[i], s.u[i]);
    }
    prev_in = in;
  }
  if (s.continuous) {
    const auto [u, v] = refine_max(s.u, gm.k, obj, vals[gm.k]);
    out.u_hat = u;
    out.value = v;
    if (out.argmax.front().first == out.argmax.front().second) out.argmax.front() = {u, u};
  }
  return out;
}

StaticTest static_optimality_test(const ValidatedProblem& problem, const HamiltonianModel& h) {
  const double zeta = h.zeta();
  StaticTest t{};
  t.m_r = argmax_runs(h.revenue_envelope(), zeta);
  t.m_c = argmax_runs(h.cost_envelope(), zeta);
  t.delta_match = 1e-6 * std::max(1.0, std::min(problem.q_max(), h.trunc_bound()));
  t.m_zeta = intersect(t.m_r, t.m_c, t.delta_match);
  t.optimal = !t.m_zeta.empty();
  t.best_static = static_candidate(problem).value;
  t.h_zeta = h(zeta);
  return t;
}

Convexified convexified_static(const ValidatedProblem&, const HamiltonianModel& h) {
  const Envelope& rev = h.revenue_envelope();
  const Envelope& cost = h.cost_envelope();
  const double u_max = std::min(rev.hi(), cost.hi());
  std::vector<double> us;
  for (const double u : rev.xs()) {
    if (u <= u_max) us.push_back(u);
  }
  for (const double u : cost.xs()) {
    if (u <= u_max) us.push_back(u);
  }
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end()), us.end());

  auto obj = [&](double u) { return rev.hull_at(u) - cost.hull_at(u); };
  std::vector<double> vals(us.size());
  std::transform(us.begin(), us.end(), vals.begin(), obj);
  const GridMax gm = grid_argmax(vals);
  const auto [u, v] = refine_max(us, gm.k, obj, vals[gm.k]);
  return {u, v};
}

double RelaxedStatic::mean_revenue(const ValidatedProblem& p) const {
  return gamma * p.revenue(q1) + (1.0 - gamma) * p.revenue(q2);
}

double RelaxedStatic::mean_cost(const ValidatedProblem& p) const {
  return nu * p.cost(a1) + (1.0 - nu) * p.cost(a2);
}

RelaxedStatic relaxed_static(const ValidatedProblem& problem, const HamiltonianModel& h, double u_tilde) {
  const Envelope& rev = h.revenue_envelope();
  const Envelope& cost = h.cost_envelope();
  const Decomposition dr = hull_decompose(rev, u_tilde);
  const Decomposition dc = hull_decompose(cost, u_tilde);
  RelaxedStatic rs{dr.x1, dr.x2, dr.delta, dc.x1, dc.x2, dc.delta, u_tilde};
  if (rs.gamma >= 1.0 - 1e-12) rs = {rs.q1, rs.q1, 1.0, rs.a1, rs.a2, rs.nu, u_tilde};
  if (rs.nu >= 1.0 - 1e-12) rs = {rs.q1, rs.q2, rs.gamma, rs.a1, rs.a1, 1.0, u_tilde};

  const double r_hull = rev.hull_at(u_tilde);
  const double c_hull = cost.hull_at(u_tilde);
  const double scale = std::max({1.0, std::abs(r_hull), std::abs(c_hull), std::abs(u_tilde)});
  const double tol = 1e-9 * scale;
  const double q_mean = rs.gamma * rs.q1 + (1.0 - rs.gamma) * rs.q2;
  const double a_mean = rs.nu * rs.a1 + (1.0 - rs.nu) * rs.a2;
  if (std::abs(q_mean - u_tilde) > tol || std::abs(a_mean - u_tilde) > tol ||
      std::abs(rs.mean_revenue(problem) - r_hull) > tol || std::abs(rs.mean_cost(problem) - c_hull) > tol) {
    throw DecompositionMismatch("two-point mixture does not reproduce the hull values at u_tilde");
  }
  return rs;
}

TailPlan cyclic_strategy(const RelaxedStatic& rs, double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("cycle length eps must be positive");
  if (rs.point_mass()) return StaticPlan{rs.u_tilde};
  const double kappa = (rs.q2 - rs.a1) / (rs.q2 - rs.a1 + rs.a2 - rs.q1);
  return CyclicPlan{eps, kappa, rs.a1, rs.a2, rs.q1, rs.q2};
}

FeedbackControl feedback_controls(const HamiltonianModel& h, double xi) {
  return {h.cost_conjugate(xi).argmax_lo, h.revenue_conjugate(xi).argmax_lo};
}

TailPlan make_tail(const ValidatedProblem& problem, const HamiltonianModel& h, const TailChoice& choice) {
  auto relaxed = [&] { return relaxed_static(problem, h, convexified_static(problem, h).u_tilde); };
  switch (choice.kind) {
    case TailKind::kStatic:
      return StaticPlan{static_candidate(problem).u_hat};
    case TailKind::kRelaxed:
      return relaxed();
    case TailKind::kCyclic:
      return cyclic_strategy(relaxed(), choice.eps);
    case TailKind::kAuto:
      break;
  }
  if (static_optimality_test(problem, h).optimal) return StaticPlan{static_candidate(problem).u_hat};
  return relaxed();
}

double DrawdownPlan::price_at(double time) const {
  if (zeta_zero) return 0.0;
  return std::min(vf->zeta(), xi0 * std::exp(beta * std::max(time, 0.0)));
}

double DrawdownPlan::inventory_at(double time) const {
  if (time <= 0.0 || zeta_zero) return x0;
  if (time >= tau) return 0.0;
  return vf->psi(price_at(time));
}

FeedbackControl DrawdownPlan::controls_at(double time) const {
  return feedback_controls(vf->hamiltonian(), price_at(time));
}

DrawdownPlan drawdown_plan(const ValidatedProblem& problem, const ValueFunction& vf, double x0,
                           const TailChoice& choice) {
  if (!(x0 > 0.0)) throw InvalidParameter("drawdown needs a positive initial inventory");
  DrawdownPlan plan;
  plan.x0 = x0;
  plan.beta = vf.beta();
  plan.tail = make_tail(problem, vf.hamiltonian(), choice);
  plan.vf = vf;
  if (vf.constant()) {
    plan.zeta_zero = true;
    plan.t = {0.0};
    plan.x = {x0};
    return plan;
  }
  plan.xi0 = vf.v_prime(x0);
  plan.tau = std::log(vf.zeta() / plan.xi0) / vf.beta();
  constexpr std::size_t kKnots = 1025;
  plan.t.resize(kKnots);
  plan.x.resize(kKnots);
  for (std::size_t i = 0; i < kKnots; ++i) {
    plan.t[i] = plan.tau * static_cast<double>(i) / static_cast<double>(kKnots - 1);
    plan.x[i] = i == 0 ? x0 : (i + 1 == kKnots ? 0.0 : vf.psi(plan.price_at(plan.t[i])));
  }
  return plan;
}

// ---------------------------------------------------------------------------

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kI:
      return "i";
    case Regime::kII:
      return "ii";
    case Regime::kIII:
      return "iii";
  }
  return "?";
}

Regime classify_regime(double a, double b, double k) {
  if (!(a > 0.0 && b > 0.0 && k > 0.0)) throw InvalidParameter("A, B and K must be positive");
  if (a <= k * k / 4.0) return Regime::kI;
  if (a < 3.0 * b * k + k * k / 4.0) return Regime::kII;
  return Regime::kIII;
}

ArvanMosesReference arvan_moses_reference(double a, double b, double k) {
  const Regime r = classify_regime(a, b, k);
  ArvanMosesReference out{r, 0.0, 0.0, std::nullopt};
  switch (r) {
    case Regime::kI:
      out.zeta = a;
      out.u_hat = 0.0;
      break;
    case Regime::kII: {
      out.zeta = k * k / 4.0;
      out.u_hat = (a - k * k / 4.0) / (2.0 * b);
      const double a2 = 1.5 * k;
      out.relaxed = RelaxedStatic{out.u_hat, out.u_hat, 1.0, 0.0, a2, 1.0 - out.u_hat / a2, out.u_hat};
      break;
    }
    case Regime::kIII: {
      const double s = -b + std::sqrt(b * b - 2.0 * b * k + a);
      out.zeta = s * s;
      out.u_hat = k + s;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_drawdown_csv(std::ostream& os, const DrawdownPlan& plan) {
  os << "t,X,alpha,q\n" << std::setprecision(17);
  for (std::size_t i = 0; i < plan.t.size(); ++i) {
    const FeedbackControl c = plan.zeta_zero ? FeedbackControl{0.0, 0.0} : plan.controls_at(plan.t[i]);
    os << plan.t[i] << ',' << plan.x[i] << ',' << c.alpha << ',' << c.q << '\n';
  }
}

void write_tail(std::ostream& os, const TailPlan& tail) {
  os << std::setprecision(17);
  if (const auto* s = std::get_if<StaticPlan>(&tail)) {
    os << "kind=static\nu=" << s->u << '\n';
  } else if (const auto* r = std::get_if<RelaxedStatic>(&tail)) {
    os << "kind=relaxed\nq1=" << r->q1 << "\nq2=" << r->q2 << "\ngamma=" << r->gamma << "\na1=" << r->a1
       << "\na2=" << r->a2 << "\nnu=" << r->nu << "\nu_tilde=" << r->u_tilde << '\n';
  } else if (const auto* c = std::get_if<CyclicPlan>(&tail)) {
    os << "kind=cyclic\nq1=" << c->q1 << "\nq2=" << c->q2 << "\na1=" << c->a1 << "\na2=" << c->a2
       << "\nkappa=" << c->kappa << "\neps=" << c->eps << '\n';
  }
}

}  // namespace prodprice
