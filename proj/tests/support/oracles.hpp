#pragma once

// Reference computations used by the tests. Nothing here calls the solver;
// closed forms are written out by hand and the generic pieces are brute force.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <cstdint>
#include <random>
#include <vector>

#include "prodprice/problem.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Linear demand R = (A − Bq)q on [0, A/B], cubic cost C = α³/3 − Kα² + K²α on [0, ∞).

struct LinearCubic {
  double a, b, k;

  double revenue(double q) const { return (a - b * q) * q; }
  double cost(double al) const { return al * al * al / 3.0 - k * al * al + k * k * al; }

  // Stationary point of R(q) − qz, clipped to [0, A/B].
  double q_hat(double z) const { return std::clamp((a - z) / (2.0 * b), 0.0, a / b); }
  double r_hat(double z) const { return revenue(q_hat(z)) - q_hat(z) * z; }

  // αz − C(α) has C′(α) = (α − K)², so the only interior local max is K + √z;
  // the other candidate is α = 0 with value 0.
  double c_hat(double z) const {
    const double al = k + std::sqrt(z);
    return std::max(0.0, al * z - cost(al));
  }
  double alpha_hat_hi(double z) const {
    const double al = k + std::sqrt(z);
    return al * z - cost(al) >= 0.0 ? al : 0.0;
  }

  double h(double z) const { return r_hat(z) + c_hat(z); }

  // Least z with right derivative α̂_hi − q̂ >= 0.
  double zeta() const {
    double lo = 0.0;
    double hi = std::max(1.0, a) * 4.0 + k * k;
    if (alpha_hat_hi(0.0) - q_hat(0.0) >= 0.0) return 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (alpha_hat_hi(mid) - q_hat(mid) >= 0.0 ? hi : lo) = mid;
    }
    return hi;
  }

  // Maximizer of R̃ − C̃ written from the three-case formula.
  double u_tilde_formula() const {
    const double t1 = k * k / 4.0;
    const double t2 = 3.0 * b * k + k * k / 4.0;
    if (a <= t1) return 0.0;
    if (a <= t2) return (a - t1) / (2.0 * b);
    return -b + k + std::sqrt(b * b - 2.0 * b * k + a);
  }

  // ζ from ũ: R′(ũ) (the demand side pins the shadow price), or A when ũ = 0.
  double zeta_formula() const {
    const double u = u_tilde_formula();
    if (u == 0.0) return a;
    return a - 2.0 * b * u;
  }

  bool nonconvex_regime() const { return k * k / 4.0 < a && a < 3.0 * b * k + k * k / 4.0; }
};

// ---------------------------------------------------------------------------
// Linear cost example: R = q(1 − q) on [0, 1], C = cα on [0, ᾱ], discount β.

struct LinearCost {
  double c = 0.2;
  double abar = 0.3;
  double beta = 0.5;

  double h(double z) const {
    const double q = std::clamp((1.0 - z) / 2.0, 0.0, 1.0);
    return q * (1.0 - q) - q * z + abar * std::max(0.0, z - c);
  }
  // H′ vanishes at (1 − z)/2 = ᾱ.
  double zeta() const { return 1.0 - 2.0 * abar; }

  // Ψ(ξ) = ∫_ξ^ζ ((1 − z)/2 − ᾱ 1{z > c}) / (βz) dz, antiderivative in closed form.
  double psi(double xi) const {
    const double zt = zeta();
    const double smooth = (0.5 * std::log(zt / xi) - 0.5 * (zt - xi)) / beta;
    const double prod = xi < zt ? abar * std::log(zt / std::max(xi, c)) / beta : 0.0;
    return smooth - prod;
  }
  double x_hat() const { return psi(c); }
  // ξ(x) by bisection on the decreasing Ψ.
  double xi_of(double x) const {
    if (x <= 0.0) return zeta();
    double lo = std::log(1e-300);
    double hi = std::log(zeta());
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (psi(std::exp(mid)) > x ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
  }
  double value(double x) const { return h(xi_of(x)) / beta; }
  double tau(double x0) const { return std::log(zeta() / xi_of(x0)) / beta; }
};

// ---------------------------------------------------------------------------
// Brute-force conjugates of a curve sampled on a grid.

inline double brute_cost_conjugate(const std::function<double(double)>& c, const std::vector<double>& grid,
                                   double z) {
  double best = -std::numeric_limits<double>::infinity();
  for (const double al : grid) best = std::max(best, al * z - c(al));
  return best;
}

inline double brute_revenue_conjugate(const std::function<double(double)>& r, const std::vector<double>& grid,
                                      double z) {
  double best = -std::numeric_limits<double>::infinity();
  for (const double q : grid) best = std::max(best, r(q) - q * z);
  return best;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random table instances that satisfy the model assumptions.

struct RandomInstance {
  prodprice::ProblemSpec spec;
  bool ray = false;
};

inline RandomInstance random_table_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  RandomInstance inst;
  prodprice::ProblemSpec& s = inst.spec;
  s.beta = 0.2 + 1.8 * u01(rng);
  s.grid_n = 1025;

  const double q_max = 0.5 + 1.5 * u01(rng);
  const int nq = 3 + static_cast<int>(rng() % 8);
  prodprice::Table r;
  for (int i = 0; i <= nq; ++i) {
    const double q = i == nq ? q_max : q_max * i / nq;
    r.xs.push_back(q);
    r.fs.push_back(i == 0 ? 0.0 : q * (1.2 - 0.4 * q / q_max) * (0.3 + u01(rng)));
  }
  s.revenue = r;
  s.q_set = prodprice::Interval{0.0, q_max};

  inst.ray = seed % 3 == 0;
  const double a_max = 0.5 + 2.0 * u01(rng);
  const int na = 3 + static_cast<int>(rng() % 8);
  prodprice::Table c;
  double level = 0.0;
  for (int i = 0; i <= na; ++i) {
    c.xs.push_back(i == na ? a_max : a_max * i / na);
    if (i > 0) level += (0.05 + u01(rng)) * a_max / na;
    c.fs.push_back(level);
  }
  if (inst.ray) {
    // A few steepening knots so C(a)/a visibly grows before the continuation.
    for (int j = 1; j <= 3; ++j) {
      const double x = c.xs.back() + 0.25 * a_max;
      level += 0.25 * a_max * (2.0 * level / c.xs.back() + j);
      c.xs.push_back(x);
      c.fs.push_back(level);
    }
  }
  s.cost = c;
  if (inst.ray) {
    s.a_set = prodprice::RightRay{0.0};
  } else {
    s.a_set = prodprice::Interval{0.0, a_max};
  }
  return inst;
}

}  // namespace oracle
