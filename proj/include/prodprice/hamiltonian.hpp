#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "prodprice/envelope.hpp"
#include "prodprice/problem.hpp"

namespace prodprice {

struct HamiltonianOptions {
  std::size_t grid_n = 4097;  ///< points of the tabulated z grid
  /// Starting truncation c̄ for an unbounded A. It still grows when the cost
  /// maximizer at z_max is not interior.
  std::optional<double> trunc_bound;
  double trunc_cap = 1e9;
};

/// One-sided derivatives of H.
struct Subgradient {
  double h_minus;
  double h_plus;
};

struct MinimizerSet {
  double zeta;
  double m_lo;
  double m_hi;
};

/// H(z) = R̂(z) + Ĉ(z) on [0, z_max], with its least minimizer.
///
/// Copies share the underlying hulls and table.
class HamiltonianModel {
 public:
  const std::vector<double>& z_grid() const;
  const std::vector<double>& values() const;
  double z_max() const;
  double zeta() const;
  double m_lo() const;
  double m_hi() const;
  /// c̄ for an unbounded A, otherwise the upper end of A.
  double trunc_bound() const;

  /// H(z) from the conjugates (not interpolated). Throws OutOfDomain off [0, z_max].
  double operator()(double z) const;
  ConjugateValue revenue_conjugate(double z) const;
  ConjugateValue cost_conjugate(double z) const;
  /// h_minus = α̂_lo − q̂_hi, h_plus = α̂_hi − q̂_lo.
  Subgradient subgradient(double z) const;

  /// Prices in (0, z_max) where a maximizer jumps, sorted.
  const std::vector<double>& kinks() const;

  const Envelope& revenue_envelope() const;
  const Envelope& cost_envelope() const;

  struct Impl;

 private:
  friend HamiltonianModel build_hamiltonian(const ValidatedProblem&, const HamiltonianOptions&);
  std::shared_ptr<const Impl> impl_;
};

HamiltonianModel build_hamiltonian(const ValidatedProblem& problem, const HamiltonianOptions& opts = {});

MinimizerSet least_minimizer(const HamiltonianModel& h);
Subgradient subgradient(const HamiltonianModel& h, double z);

}  // namespace prodprice
