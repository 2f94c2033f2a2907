#include "prodprice/value.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <boost/math/tools/toms748_solve.hpp>

#include "prodprice/errors.hpp"

namespace prodprice {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double ValueFunction::cell_integral(double a, double b) const {
  const Subgradient ga = h_.subgradient(a);
  const Subgradient gb = h_.subgradient(b);
  const double m = 0.5 * (a + b);
  const Subgradient gm = h_.subgradient(m);
  const double fa = -ga.h_plus / (beta_ * a);
  const double fb = -gb.h_minus / (beta_ * b);
  const double fm = -0.5 * (gm.h_minus + gm.h_plus) / (beta_ * m);
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

ValueFunction build_value(const HamiltonianModel& h, double beta, const ValueOptions& opts) {
  if (!(beta > 0.0)) throw InvalidParameter("beta must be positive");
  if (!(opts.ratio > 0.0 && opts.ratio < 1.0)) throw InvalidParameter("xi grid ratio must lie in (0, 1)");
  ValueFunction vf(h);
  vf.beta_ = beta;
  vf.zeta_ = h.zeta();
  vf.h0_ = h(0.0);
  vf.h_zeta_ = h(vf.zeta_);
  if (vf.zeta_ == 0.0) return vf;

  const double zeta = vf.zeta_;
  const double floor = zeta * opts.floor_factor;
  std::vector<double> xi;
  for (double x = zeta; xi.size() < opts.max_knots; x *= opts.ratio) {
    xi.push_back(std::max(x, floor));
    if (x <= floor) break;
  }
  const double xi_min = xi.back();
  for (const double k : h.kinks()) {
    if (k > xi_min && k < zeta) xi.push_back(k);
  }
  std::sort(xi.begin(), xi.end(), std::greater<>());
  const double merge = 1e-12 * zeta;
  std::vector<double> knots;
  for (const double x : xi) {
    if (knots.empty() || knots.back() - x > merge) knots.push_back(x);
  }
  knots.back() = xi_min;

  vf.psi_.assign(knots.size(), 0.0);
  CompensatedSum acc;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    acc.add(vf.cell_integral(knots[i], knots[i - 1]));
    vf.psi_[i] = acc.value();
  }
  vf.xi_ = std::move(knots);
  const Subgradient g = h.subgradient(xi_min);
  vf.tail_ = -0.5 * (g.h_minus + g.h_plus) / beta;
  if (!(vf.tail_ > 0.0)) vf.tail_ = std::numeric_limits<double>::min();
  return vf;
}

double ValueFunction::psi(double xi) const {
  if (constant() || xi >= zeta_) return 0.0;
  if (!(xi > 0.0)) return std::numeric_limits<double>::infinity();
  if (xi < xi_.back()) return psi_.back() + tail_ * std::log(xi_.back() / xi);
  // First knot strictly below xi; the cell is [xi_[k], xi_[k-1]].
  const auto it = std::upper_bound(xi_.begin(), xi_.end(), xi, std::greater<>());
  const std::size_t k = static_cast<std::size_t>(it - xi_.begin());
  if (xi_[k - 1] == xi) return psi_[k - 1];
  return psi_[k - 1] + cell_integral(xi, xi_[k - 1]);
}

double ValueFunction::v_prime(double x) const {
  if (constant()) return 0.0;
  if (x <= 0.0) return zeta_;
  if (x >= psi_.back()) return xi_.back() * std::exp(-(x - psi_.back()) / tail_);
  const auto it = std::upper_bound(psi_.begin(), psi_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - psi_.begin());
  if (psi_[k - 1] == x) return xi_[k - 1];
  const double hi = xi_[k - 1];
  const double lo = xi_[k];
  const double base = psi_[k - 1] - x;
  auto f = [&](double xi) { return xi == hi ? base : base + cell_integral(xi, hi); };
  const double f_lo = psi_[k] - x;
  const double f_hi = base;
  if (f_lo <= 0.0) return lo;
  boost::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

double ValueFunction::value_at(double x) const {
  if (constant()) return h0_ / beta_;
  return h_(v_prime(x)) / beta_;
}

double v_prime(const ValueFunction& vf, double x) { return vf.v_prime(x); }
double value_at(const ValueFunction& vf, double x) { return vf.value_at(x); }

double hjb_residual(const ValueFunction& vf, const HamiltonianModel& h, double x) {
  return vf.beta() * vf.value_at(x) - h(vf.v_prime(x));
}

double hjb_residual(const HamiltonianModel& h, double beta, double u, double du) {
  return beta * u - h(du);
}

void write_value_csv(std::ostream& os, const ValueFunction& vf, const std::vector<double>& xs) {
  os << "x,v,v_prime\n" << std::setprecision(17);
  for (const double x : xs) os << x << ',' << vf.value_at(x) << ',' << vf.v_prime(x) << '\n';
}

}  // namespace prodprice
