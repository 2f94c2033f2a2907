#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "prodprice/problem.hpp"

namespace prodprice {

struct DPResult {
  std::vector<double> x;
  std::vector<double> v_hat;
  std::vector<double> alpha;  ///< maximizing production per state
  std::vector<double> q;      ///< maximizing sales per state
  double dt = 0.0;
  std::size_t iterations = 0;
  double sup_change = 0.0;

  /// Linear interpolation of v_hat (clamped to the grid).
  double value_at(double x) const;
};

struct DPOptions {
  std::size_t max_sweeps = 100000;  ///< greedy sweeps
};

/// Semi-discrete value iteration
///   v(x) = max (R(q) − C(α)) (1 − e^{−βdt})/β + e^{−βdt} v(x + (α − q) dt)
/// over x + (α − q)dt >= 0, controls on a lattice of step q_max/(nx/4) plus
/// the control-set endpoints, linear interpolation in x and a clamp at x_max.
/// Gauss-Seidel greedy sweeps alternate direction and are interleaved with
/// partial evaluation sweeps of the current greedy policy. `iterations` counts
/// greedy sweeps; convergence is declared when one changes v by < tol_fix.
/// Throws InvalidParameter on a bad grid and NotConverged at the sweep cap.
DPResult dp_value(const ValidatedProblem& problem, double x_max, std::size_t nx, double dt, double tol_fix,
                  const DPOptions& opts = {});

enum class ConjugateKind { kCost, kRevenue };

/// Exhaustive max over `grid` of αz − C(α) (kCost) or R(q) − qz (kRevenue).
double brute_conjugate(const Curve& curve, const std::vector<double>& grid, double z, ConjugateKind kind);

/// Rows `x,v_hat,alpha_star,q_star` with a header, 17 significant digits.
void write_dp_csv(std::ostream& os, const DPResult& r);

}  // namespace prodprice
