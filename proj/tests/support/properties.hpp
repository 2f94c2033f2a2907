#pragma once

// Randomized invariant checks shared by the property test and the acceptance run.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "prodprice/hamiltonian.hpp"
#include "prodprice/value.hpp"
#include "support/oracles.hpp"

namespace props {

inline constexpr std::uint64_t kSeeds = 100;

struct Report {
  bool h_convex = true;
  bool zeta_nonneg = true;
  bool zeta_least = true;
  bool v_prime_decreasing = true;
  bool v_prime_at_zero = true;
  bool v_below_limit = true;
  bool boundary_subsolution = true;
  bool hull_equivalence = true;
  bool truncation_invariance = true;
  std::string detail;

  bool all() const {
    return h_convex && zeta_nonneg && zeta_least && v_prime_decreasing && v_prime_at_zero && v_below_limit &&
           boundary_subsolution && hull_equivalence && truncation_invariance;
  }
};

// sup of αz − C(α) over the raw table and, on a ray, its quadratic continuation.
inline double raw_cost_conjugate(const prodprice::Table& t, bool ray, double z) {
  double best = -1e300;
  for (std::size_t i = 0; i < t.xs.size(); ++i) best = std::max(best, t.xs[i] * z - t.fs[i]);
  if (ray) {
    const std::size_t n = t.xs.size();
    const double xn = t.xs[n - 1];
    const double sn = (t.fs[n - 1] - t.fs[n - 2]) / (xn - t.xs[n - 2]);
    if (z > sn) {
      const double d = (z - sn) * xn / sn;
      best = std::max(best, (xn + d) * z - (t.fs[n - 1] + sn * d + sn * d * d / (2.0 * xn)));
    }
  }
  return best;
}

inline double raw_revenue_conjugate(const prodprice::Table& t, double z) {
  double best = -1e300;
  for (std::size_t i = 0; i < t.xs.size(); ++i) best = std::max(best, t.fs[i] - t.xs[i] * z);
  return best;
}

inline Report check_instance(std::uint64_t seed) {
  using namespace prodprice;
  const oracle::RandomInstance inst = oracle::random_table_instance(seed);
  const ValidatedProblem p = validate_problem(inst.spec);
  const HamiltonianModel h = build_hamiltonian(p);
  const ValueFunction vf = build_value(h, p.beta());
  const double beta = p.beta();
  const double zeta = h.zeta();

  Report r;
  std::ostringstream why;
  why.precision(17);

  const std::vector<double> zs = oracle::linspace(0.0, h.z_max(), 801);
  std::vector<double> hz(zs.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    hz[i] = h(zs[i]);
    scale = std::max(scale, std::abs(hz[i]));
  }

  for (std::size_t i = 1; i + 1 < zs.size(); ++i) {
    if (hz[i - 1] + hz[i + 1] - 2.0 * hz[i] < -1e-9 * scale) {
      r.h_convex = false;
      why << "H not convex at z=" << zs[i] << "; ";
      break;
    }
  }

  r.zeta_nonneg = zeta >= 0.0;
  const double h_zeta = h(zeta);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const bool left = zs[i] < zeta * (1.0 - 1e-3) - 1e-6;
    if (hz[i] < h_zeta - 1e-9 * scale || (left && !(hz[i] > h_zeta))) {
      r.zeta_least = false;
      why << "zeta=" << zeta << " not the least minimizer (z=" << zs[i] << "); ";
      break;
    }
  }

  if (vf.constant()) {
    r.v_prime_at_zero = zeta == 0.0 && vf.v_prime(0.0) == 0.0;
    r.v_prime_decreasing = vf.v_prime(1.0) == 0.0;
  } else {
    r.v_prime_at_zero = std::abs(vf.v_prime(0.0) - zeta) <= 1e-12 * zeta;
    const double x_end = 1.5 * vf.psi_knots().back();
    double prev = vf.v_prime(0.0);
    for (const double x : oracle::linspace(x_end / 400.0, x_end, 400)) {
      const double cur = vf.v_prime(x);
      if (!(cur < prev)) {
        r.v_prime_decreasing = false;
        why << "v' not decreasing at x=" << x << "; ";
        break;
      }
      prev = cur;
    }
  }

  const double limit = vf.H_at_0() / beta;
  for (const double x : oracle::linspace(0.0, 10.0, 201)) {
    if (vf.value_at(x) > limit + 1e-12 * scale) {
      r.v_below_limit = false;
      why << "v(" << x << ") above H(0)/beta; ";
      break;
    }
  }

  const double bv0 = beta * vf.value_at(0.0);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (zs[i] >= zeta && bv0 > hz[i] + 1e-12 * scale) {
      r.boundary_subsolution = false;
      why << "beta v(0) > H(" << zs[i] << "); ";
      break;
    }
  }

  const auto& rt = std::get<Table>(inst.spec.revenue);
  const auto& ct = std::get<Table>(inst.spec.cost);
  for (const double z : zs) {
    const double rr = raw_revenue_conjugate(rt, z);
    const double rc = raw_cost_conjugate(ct, inst.ray, z);
    if (std::abs(h.revenue_conjugate(z).value - rr) > 1e-9 * scale ||
        std::abs(h.cost_conjugate(z).value - rc) > 1e-9 * scale) {
      r.hull_equivalence = false;
      why << "hull conjugate differs from the raw curve at z=" << z << "; ";
      break;
    }
  }

  HamiltonianOptions doubled;
  doubled.trunc_bound = 2.0 * h.trunc_bound();
  if (inst.ray) {
    const double z2 = build_hamiltonian(p, doubled).zeta();
    if (!(std::abs(z2 - zeta) < 1e-9)) {
      r.truncation_invariance = false;
      why << "zeta moved by " << z2 - zeta << " when the truncation doubled; ";
    }
  }

  r.detail = "seed " + std::to_string(seed) + ": " + why.str();
  return r;
}

}  // namespace props
