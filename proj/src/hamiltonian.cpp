#include "prodprice/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prodprice/errors.hpp"

namespace prodprice {

struct HamiltonianModel::Impl {
  Envelope rev;
  Envelope cost;
  std::vector<double> z;
  std::vector<double> h;
  std::vector<double> kinks;
  double z_max = 0.0;
  double zeta = 0.0;
  double m_hi = 0.0;
  double cbar = 0.0;

  double eval(double s) const {
    return fenchel_revenue(rev, s).value + fenchel_cost(cost, s).value;
  }
  double h_plus(double s) const {
    return fenchel_cost(cost, s).argmax_hi - fenchel_revenue(rev, s).argmax_lo;
  }
};

namespace {

Envelope revenue_envelope_of(const ValidatedProblem& p) {
  std::vector<double> qs = p.q_samples();
  std::vector<double> fs(qs.size());
  std::transform(qs.begin(), qs.end(), fs.begin(), [&](double q) { return p.revenue(q); });
  Envelope::Evaluator ev;
  if (p.q_continuous()) ev = [curve = p.revenue_curve()](double q) { return curve(q); };
  return concave_hull(std::move(qs), std::move(fs), std::move(ev));
}

Envelope cost_envelope_of(const ValidatedProblem& p, double cbar) {
  std::vector<double> as = p.a_samples(cbar);
  std::vector<double> fs(as.size());
  std::transform(as.begin(), as.end(), fs.begin(), [&](double a) { return p.cost(a); });
  Envelope::Evaluator ev;
  if (p.a_continuous()) ev = [curve = p.cost_curve()](double a) { return curve(a); };
  return convex_hull(std::move(as), std::move(fs), std::move(ev));
}

}  // namespace

HamiltonianModel build_hamiltonian(const ValidatedProblem& problem, const HamiltonianOptions& opts) {
  if (opts.grid_n < 3) throw InvalidParameter("z grid needs at least 3 points");
  auto impl = std::make_shared<HamiltonianModel::Impl>();
  impl->rev = revenue_envelope_of(problem);

  const bool ray = problem.a_unbounded();
  impl->cbar = ray ? opts.trunc_bound.value_or(1.0) : upper_bound(problem.a_set());
  if (!(impl->cbar > 0.0)) throw InvalidParameter("truncation bound must be positive");
  impl->cost = cost_envelope_of(problem, impl->cbar);

  const double s0 = impl->rev.segments().front().slope;
  double zm = s0 > 0.0 ? 2.0 * s0 : 1.0;
  for (int d = 0;; ++d) {
    if (ray) {
      while (fenchel_cost(impl->cost, zm).argmax_hi >= 0.9 * impl->cbar) {
        impl->cbar *= 2.0;
        if (impl->cbar > opts.trunc_cap) {
          throw TruncationFailed("production truncation exceeded its cap; is C really coercive?");
        }
        impl->cost = cost_envelope_of(problem, impl->cbar);
      }
    }
    const double h0 = impl->eval(0.0);
    if (impl->eval(zm) > h0 + 1e-9 * (1.0 + std::abs(h0))) break;
    if (d == 60) throw TruncationFailed("could not bracket the minimizer of H");
    zm *= 2.0;
  }
  impl->z_max = zm;

  const std::size_t n = opts.grid_n;
  impl->z.resize(n);
  impl->h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    impl->z[i] = i + 1 == n ? zm : zm * static_cast<double>(i) / static_cast<double>(n - 1);
    impl->h[i] = impl->eval(impl->z[i]);
  }

  for (const double s : impl->rev.kink_slopes()) {
    if (s > 0.0 && s < zm) impl->kinks.push_back(s);
  }
  for (const double s : impl->cost.kink_slopes()) {
    if (s > 0.0 && s < zm) impl->kinks.push_back(s);
  }
  std::sort(impl->kinks.begin(), impl->kinks.end());
  impl->kinks.erase(std::unique(impl->kinks.begin(), impl->kinks.end(),
                                [&](double a, double b) { return b - a <= 1e-14 * std::max(1.0, zm); }),
                    impl->kinks.end());

  // Least z with a non-negative right derivative.
  if (impl->h_plus(0.0) >= 0.0) {
    impl->zeta = 0.0;
  } else {
    double lo = 0.0;
    double hi = zm;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, zm); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (impl->h_plus(mid) >= 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    impl->zeta = hi < 1e-10 * zm ? 0.0 : hi;
    // Argmax ties blur the sign test near a kink; a kink this close is the exact minimizer.
    const auto near = std::lower_bound(impl->kinks.begin(), impl->kinks.end(), impl->zeta - 1e-9 * std::max(1.0, zm));
    if (impl->zeta > 0.0 && near != impl->kinks.end() && std::abs(*near - impl->zeta) <= 1e-9 * std::max(1.0, zm)) {
      impl->zeta = *near;
    }
  }

  const double hz = impl->eval(impl->zeta);
  const double thr = hz + 1e-12 * std::abs(hz) + 1e-14;
  auto first_above = std::upper_bound(impl->z.begin(), impl->z.end(), impl->zeta);
  while (first_above != impl->z.end() && impl->h[first_above - impl->z.begin()] <= thr) ++first_above;
  if (first_above == impl->z.end()) {
    impl->m_hi = zm;
  } else {
    double lo = first_above == impl->z.begin() ? impl->zeta : std::max(impl->zeta, *(first_above - 1));
    double hi = *first_above;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, zm); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (impl->eval(mid) <= thr) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    impl->m_hi = lo;
  }

  HamiltonianModel model;
  model.impl_ = std::move(impl);
  return model;
}

const std::vector<double>& HamiltonianModel::z_grid() const { return impl_->z; }
const std::vector<double>& HamiltonianModel::values() const { return impl_->h; }
double HamiltonianModel::z_max() const { return impl_->z_max; }
double HamiltonianModel::zeta() const { return impl_->zeta; }
double HamiltonianModel::m_lo() const { return impl_->zeta; }
double HamiltonianModel::m_hi() const { return impl_->m_hi; }
double HamiltonianModel::trunc_bound() const { return impl_->cbar; }
const std::vector<double>& HamiltonianModel::kinks() const { return impl_->kinks; }
const Envelope& HamiltonianModel::revenue_envelope() const { return impl_->rev; }
const Envelope& HamiltonianModel::cost_envelope() const { return impl_->cost; }

namespace {

double checked(double z, double zm) {
  const double slack = 1e-12 * std::max(1.0, zm);
  if (!(z >= -slack && z <= zm + slack)) throw OutOfDomain("price outside [0, z_max]");
  return std::clamp(z, 0.0, zm);
}

}  // namespace

double HamiltonianModel::operator()(double z) const { return impl_->eval(checked(z, impl_->z_max)); }

ConjugateValue HamiltonianModel::revenue_conjugate(double z) const {
  return fenchel_revenue(impl_->rev, checked(z, impl_->z_max));
}

ConjugateValue HamiltonianModel::cost_conjugate(double z) const {
  return fenchel_cost(impl_->cost, checked(z, impl_->z_max));
}

Subgradient HamiltonianModel::subgradient(double z) const {
  z = checked(z, impl_->z_max);
  const ConjugateValue r = fenchel_revenue(impl_->rev, z);
  const ConjugateValue c = fenchel_cost(impl_->cost, z);
  return {c.argmax_lo - r.argmax_hi, c.argmax_hi - r.argmax_lo};
}

MinimizerSet least_minimizer(const HamiltonianModel& h) { return {h.zeta(), h.m_lo(), h.m_hi()}; }

Subgradient subgradient(const HamiltonianModel& h, double z) { return h.subgradient(z); }

}  // namespace prodprice
