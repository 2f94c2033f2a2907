#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "prodprice/hamiltonian.hpp"

namespace prodprice {

struct ValueOptions {
  double ratio = 0.99;         ///< geometric step of the ξ grid toward 0
  double floor_factor = 1e-6;  ///< ξ_min = ζ * floor_factor
  std::size_t max_knots = 2000;
};

/// v(x) = H(ξ(x))/β with x = Ψ(ξ) = −∫_ξ^ζ H′(z)/(βz) dz.
class ValueFunction {
 public:
  /// True when ζ = 0 and v ≡ H(0)/β.
  bool constant() const { return xi_.empty(); }
  double zeta() const { return zeta_; }
  double beta() const { return beta_; }
  double H_at_zeta() const { return h_zeta_; }
  double H_at_0() const { return h0_; }
  /// Decreasing prices from ζ down to ξ_min.
  const std::vector<double>& xi_knots() const { return xi_; }
  /// Increasing inventories Ψ(xi_knots[i]), starting at 0.
  const std::vector<double>& psi_knots() const { return psi_; }
  const HamiltonianModel& hamiltonian() const { return h_; }

  /// Ψ(ξ) for ξ in (0, ζ]; the logarithmic tail serves ξ < ξ_min.
  double psi(double xi) const;
  double v_prime(double x) const;
  double value_at(double x) const;

 private:
  friend ValueFunction build_value(const HamiltonianModel&, double, const ValueOptions&);
  explicit ValueFunction(HamiltonianModel h) : h_(std::move(h)) {}

  /// Simpson rule for −∫_a^b H′(z)/(βz) dz with one-sided slopes at the ends.
  double cell_integral(double a, double b) const;

  HamiltonianModel h_;
  double zeta_ = 0.0;
  double beta_ = 1.0;
  double h_zeta_ = 0.0;
  double h0_ = 0.0;
  double tail_ = 0.0;  ///< −H′(ξ_min)/β, the slope of Ψ in ln(1/ξ) below ξ_min
  std::vector<double> xi_;
  std::vector<double> psi_;
};

ValueFunction build_value(const HamiltonianModel& h, double beta, const ValueOptions& opts = {});

double v_prime(const ValueFunction& vf, double x);
double value_at(const ValueFunction& vf, double x);

/// β v(x) − H(v′(x)); zero by construction.
double hjb_residual(const ValueFunction& vf, const HamiltonianModel& h, double x);
/// β u − H(du) for an externally supplied value u and slope du.
double hjb_residual(const HamiltonianModel& h, double beta, double u, double du);

/// Rows `x,v,v_prime` with a header, 17 significant digits.
void write_value_csv(std::ostream& os, const ValueFunction& vf, const std::vector<double>& xs);

}  // namespace prodprice
