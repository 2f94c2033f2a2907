#include "prodprice/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>

#include "prodprice/errors.hpp"

namespace prodprice {

namespace {

// Control values used by the oracle: lattice multiples of h below `hi`, the
// upper end itself, the other set's upper end and any curve knots inside.
std::vector<double> control_values(const ControlSet& set, double h, double cap, const Curve& curve,
                                   double other_hi) {
  if (const auto* f = std::get_if<FiniteSet>(&set)) return f->values;
  const double hi = std::holds_alternative<RightRay>(set) ? cap : upper_bound(set);
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double u = h * static_cast<double>(k);
    if (u >= hi) break;
    out.push_back(u);
  }
  out.push_back(hi);
  if (other_hi > 0.0 && other_hi < hi) out.push_back(other_hi);
  for (const double k : curve.knots()) {
    if (k > 0.0 && k < hi) out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Flow {
  double y;  ///< α − q
  double payoff;
  double alpha;
  double q;
};

}  // namespace

double DPResult::value_at(double xq) const {
  if (xq <= x.front()) return v_hat.front();
  if (xq >= x.back()) return v_hat.back();
  const double dx = x[1] - x[0];
  const auto j = std::min(static_cast<std::size_t>(xq / dx), x.size() - 2);
  const double th = (xq - x[j]) / dx;
  return (1.0 - th) * v_hat[j] + th * v_hat[j + 1];
}

DPResult dp_value(const ValidatedProblem& problem, double x_max, std::size_t nx, double dt, double tol_fix,
                  const DPOptions& opts) {
  if (!(x_max > 0.0) || nx < 64 || !(dt > 0.0) || !(tol_fix > 0.0)) {
    throw InvalidParameter("dp_value needs x_max > 0, nx >= 64, dt > 0, tol_fix > 0");
  }
  const double dx = x_max / static_cast<double>(nx - 1);
  const double q_max = problem.q_max();
  const double h_f = q_max / static_cast<double>(nx / 4);
  const double a_cap = problem.a_unbounded() ? 8.0 * x_max / static_cast<double>(nx) / dt - q_max : upper_bound(problem.a_set());
  if (!(a_cap > 0.0)) throw InvalidParameter("dt too large for the production cap 8 x_max/(nx dt) − q_max");
  if (dt * (a_cap + q_max) > 8.0 * x_max / static_cast<double>(nx) * (1.0 + 1e-12)) {
    throw InvalidParameter("dt (max alpha + max q) must stay below 8 x_max / nx");
  }

  const double a_hi = problem.a_unbounded() ? a_cap : upper_bound(problem.a_set());
  const std::vector<double> qs = control_values(problem.q_set(), h_f, q_max, problem.revenue_curve(), a_hi);
  const std::vector<double> as = control_values(problem.a_set(), h_f, a_cap, problem.cost_curve(), q_max);
  std::vector<double> rq(qs.size());
  std::vector<double> ca(as.size());
  std::transform(qs.begin(), qs.end(), rq.begin(), [&](double q) { return problem.revenue(q); });
  std::transform(as.begin(), as.end(), ca.begin(), [&](double a) { return problem.cost(a); });

  // Best payoff for each distinct net flow.
  std::vector<Flow> all;
  all.reserve(qs.size() * as.size());
  for (std::size_t i = 0; i < as.size(); ++i) {
    for (std::size_t k = 0; k < qs.size(); ++k) all.push_back({as[i] - qs[k], rq[k] - ca[i], as[i], qs[k]});
  }
  std::sort(all.begin(), all.end(), [](const Flow& a, const Flow& b) { return a.y < b.y; });
  const double merge = 1e-12 * std::max(1.0, a_cap + q_max);
  std::vector<Flow> flows;
  for (const Flow& f : all) {
    if (!flows.empty() && f.y - flows.back().y <= merge) {
      if (f.payoff > flows.back().payoff) flows.back() = Flow{flows.back().y, f.payoff, f.alpha, f.q};
    } else {
      flows.push_back(f);
    }
  }

  const double beta = problem.beta();
  const double d = std::exp(-beta * dt);
  const double w = -std::expm1(-beta * dt) / beta;

  DPResult r;
  r.dt = dt;
  r.x.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) r.x[i] = i + 1 == nx ? x_max : dx * static_cast<double>(i);
  std::size_t stay = 0;
  while (flows[stay].y < 0.0 && stay + 1 < flows.size()) ++stay;
  // Start from the stationary "hold" policy so iterates increase monotonically.
  r.v_hat.assign(nx, flows[stay].payoff / beta);
  std::vector<std::size_t> best_flow(nx, stay);
  auto& v = r.v_hat;

  struct Move {
    std::size_t j;
    double w_lo;
    double w_hi;
  };
  auto move = [&](std::size_t i, double y) -> std::optional<Move> {
    double xt = r.x[i] + y * dt;
    if (xt < -1e-12 * x_max) return std::nullopt;
    xt = std::clamp(xt, 0.0, x_max);
    const auto j = std::min(static_cast<std::size_t>(xt / dx), nx - 2);
    const double th = std::clamp((xt - r.x[j]) / dx, 0.0, 1.0);
    return Move{j, 1.0 - th, th};
  };
  // One-step lookahead with the self-loop solved for v[i].
  auto backup = [&](std::size_t i, const Flow& fl, const Move& m) {
    double self = 0.0;
    double other = 0.0;
    if (m.j == i) {
      self += m.w_lo;
    } else {
      other += m.w_lo * v[m.j];
    }
    if (m.j + 1 == i) {
      self += m.w_hi;
    } else {
      other += m.w_hi * v[m.j + 1];
    }
    return (fl.payoff * w + d * other) / (1.0 - d * self);
  };

  auto improve = [&](std::size_t i) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bf = 0;
    for (std::size_t f = 0; f < flows.size(); ++f) {
      const auto m = move(i, flows[f].y);
      if (!m) continue;
      const double val = backup(i, flows[f], *m);
      if (val > best) {
        best = val;
        bf = f;
      }
    }
    const double change = std::abs(best - v[i]);
    v[i] = best;
    best_flow[i] = bf;
    return change;
  };

  std::vector<Move> policy_moves(nx);
  auto evaluate = [&](std::size_t i) {
    const double val = backup(i, flows[best_flow[i]], policy_moves[i]);
    const double change = std::abs(val - v[i]);
    v[i] = val;
    return change;
  };

  auto sweep = [&](std::size_t k, auto&& op) {
    double sup = 0.0;
    if (k % 2 == 0) {
      for (std::size_t i = nx; i-- > 0;) sup = std::max(sup, op(i));
    } else {
      for (std::size_t i = 0; i < nx; ++i) sup = std::max(sup, op(i));
    }
    return sup;
  };

  constexpr std::size_t kEvalSweeps = 500;
  for (std::size_t k = 0;; ++k) {
    const double sup = sweep(k, improve);
    r.iterations = k + 1;
    r.sup_change = sup;
    if (k > 0 && sup < tol_fix) break;
    if (r.iterations >= opts.max_sweeps) throw NotConverged("value iteration hit its sweep cap");
    // Partial evaluation of the current greedy policy.
    for (std::size_t i = 0; i < nx; ++i) policy_moves[i] = *move(i, flows[best_flow[i]].y);
    for (std::size_t e = 0; e < kEvalSweeps; ++e) {
      if (sweep(e, evaluate) < 0.1 * tol_fix) break;
    }
  }

  r.alpha.resize(nx);
  r.q.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    r.alpha[i] = flows[best_flow[i]].alpha;
    r.q[i] = flows[best_flow[i]].q;
  }
  return r;
}

double brute_conjugate(const Curve& curve, const std::vector<double>& grid, double z, ConjugateKind kind) {
  double best = -std::numeric_limits<double>::infinity();
  for (const double u : grid) {
    const double val = kind == ConjugateKind::kCost ? u * z - curve(u) : curve(u) - u * z;
    best = std::max(best, val);
  }
  return best;
}

void write_dp_csv(std::ostream& os, const DPResult& r) {
  os << "x,v_hat,alpha_star,q_star\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    os << r.x[i] << ',' << r.v_hat[i] << ',' << r.alpha[i] << ',' << r.q[i] << '\n';
  }
}

}  // namespace prodprice
