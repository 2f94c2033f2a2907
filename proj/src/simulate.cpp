#include "prodprice/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "prodprice/errors.hpp"

namespace prodprice {

namespace {

class Integrator {
 public:
  Integrator(const ValidatedProblem& p, double x0) : p_(p), tol_(1e-9 * std::max(1.0, x0)), x_(x0) {
    traj_.beta = p.beta();
    push(0.0, 0.0, 0.0, false);
  }

  double x() const { return x_; }
  double t() const { return t_; }

  // Advances to t1 with constant rates over the step.
  void step(double t1, double alpha, double q, double payoff, bool relaxed) {
    const double beta = p_.beta();
    const double w = std::exp(-beta * t_) * -std::expm1(-beta * (t1 - t_)) / beta;
    j_ += payoff * w;
    x_ += (alpha - q) * (t1 - t_);
    t_ = t1;
    if (x_ < -tol_) throw StateViolation(t_, x_);
    push(alpha, q, j_, relaxed);
  }

  void step(double t1, double alpha, double q) {
    step(t1, alpha, q, p_.revenue(q) - p_.cost(alpha), false);
  }

  void set_x(double x) { x_ = x; traj_.x.back() = x; }

  Trajectory finish() {
    if (traj_.t.size() > 1) {
      traj_.alpha[0] = traj_.alpha[1];
      traj_.q[0] = traj_.q[1];
      traj_.relaxed[0] = traj_.relaxed[1];
    }
    return std::move(traj_);
  }

 private:
  void push(double alpha, double q, double j, bool relaxed) {
    traj_.t.push_back(t_);
    traj_.x.push_back(x_);
    traj_.alpha.push_back(alpha);
    traj_.q.push_back(q);
    traj_.j.push_back(j);
    traj_.relaxed.push_back(relaxed);
  }

  const ValidatedProblem& p_;
  double tol_;
  double t_ = 0.0;
  double x_;
  double j_ = 0.0;
  Trajectory traj_;
};

// Uniform steps of at most h from the current time to t_end.
template <class F>
void uniform_steps(Integrator& in, double t_end, double h, F&& per_step) {
  const double t0 = in.t();
  if (!(t_end > t0)) return;
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((t_end - t0) / h - 1e-9)));
  for (std::size_t i = 1; i <= n; ++i) {
    per_step(i == n ? t_end : t0 + (t_end - t0) * static_cast<double>(i) / static_cast<double>(n));
  }
}

void run_tail(Integrator& in, const ValidatedProblem& p, const TailPlan& tail, double T, double h) {
  if (const auto* s = std::get_if<StaticPlan>(&tail)) {
    const double payoff = p.revenue(s->u) - p.cost(s->u);
    uniform_steps(in, T, h, [&](double t1) { in.step(t1, s->u, s->u, payoff, false); });
  } else if (const auto* r = std::get_if<RelaxedStatic>(&tail)) {
    const double payoff = r->mean_revenue(p) - r->mean_cost(p);
    const double a = r->nu * r->a1 + (1.0 - r->nu) * r->a2;
    const double q = r->gamma * r->q1 + (1.0 - r->gamma) * r->q2;
    // Mixture means balance exactly; keep X frozen.
    uniform_steps(in, T, h, [&](double t1) {
      const double x = in.x();
      in.step(t1, a, q, payoff, true);
      in.set_x(x);
    });
  } else if (const auto* c = std::get_if<CyclicPlan>(&tail)) {
    const double t0 = in.t();
    const double h_c = c->eps / 64.0;
    for (std::size_t period = 0;; ++period) {
      const double start = t0 + c->eps * static_cast<double>(period);
      if (start >= T) break;
      const double mid = std::min(T, start + c->kappa * c->eps);
      const double end = std::min(T, t0 + c->eps * static_cast<double>(period + 1));
      uniform_steps(in, mid, h_c, [&](double t1) { in.step(t1, c->a2, c->q1); });
      uniform_steps(in, end, h_c, [&](double t1) { in.step(t1, c->a1, c->q2); });
    }
  }
}

}  // namespace

Trajectory simulate(const ValidatedProblem& problem, const StrategyPlan& plan, double x0, double T, double dt) {
  if (!(T > 0.0)) throw InvalidParameter("horizon must be positive");
  if (!(x0 >= 0.0)) throw InvalidParameter("initial inventory must be non-negative");
  Integrator in(problem, x0);

  if (const auto* d = std::get_if<DrawdownPlan>(&plan)) {
    const double h = dt > 0.0 ? dt : (d->tau > 0.0 ? d->tau / 1024.0 : T / 4096.0);
    const double t_end = std::min(d->tau, T);
    bool hit = false;
    uniform_steps(in, t_end, h, [&](double t1) {
      if (hit) return;
      const double t0 = in.t();
      const FeedbackControl c = d->controls_at(0.5 * (t0 + t1));
      const double rate = c.alpha - c.q;
      if (rate < 0.0 && in.x() + rate * (t1 - t0) < 0.0) {
        in.step(t0 + in.x() / -rate, c.alpha, c.q);
        in.set_x(0.0);
        hit = true;
        return;
      }
      in.step(t1, c.alpha, c.q);
    });
    run_tail(in, problem, d->tail, T, std::max(h, (T - in.t()) / 4096.0));
    return in.finish();
  }

  const double h = std::max(dt > 0.0 ? dt : 0.0, T / 4096.0);
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (!std::is_same_v<P, DrawdownPlan>) run_tail(in, problem, TailPlan{p}, T, h);
      },
      plan);
  return in.finish();
}

Trajectory simulate(const ValidatedProblem& problem, const FeedbackLaw& law, double x0, double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw InvalidParameter("horizon and step must be positive");
  if (!(x0 >= 0.0)) throw InvalidParameter("initial inventory must be non-negative");
  Integrator in(problem, x0);
  uniform_steps(in, T, dt, [&](double t1) {
    const FeedbackControl c = law(in.t(), in.x());
    in.step(t1, c.alpha, c.q);
  });
  return in.finish();
}

double profit_gap(const Trajectory& traj, const ValueFunction& vf, double x0, double tol) {
  const double T = traj.horizon();
  const double disc = std::exp(-vf.beta() * T);
  const double h_max = std::max(std::abs(vf.H_at_0()), std::abs(vf.H_at_zeta()));
  if (disc * h_max / vf.beta() > tol) {
    throw HorizonTooShort("discounted tail beyond the horizon exceeds the tolerance");
  }
  const double v0 = vf.value_at(x0);
  return (v0 - traj.total() - disc * vf.value_at(std::max(traj.x.back(), 0.0))) /
         std::max(std::abs(v0), 1e-12);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,X,alpha,q,J\n" << std::setprecision(17);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    os << traj.t[i] << ',' << traj.x[i] << ',' << traj.alpha[i] << ',' << traj.q[i] << ',' << traj.j[i] << '\n';
  }
}

}  // namespace prodprice
